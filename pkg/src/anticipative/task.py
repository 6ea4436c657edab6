"""The four-state qubit guessing task and its closed-form solutions.

Four equiprobable pure states sit in a plane of the Bloch ball, pairwise
antipodal along two axes ``a`` and ``b`` separated by an angle ``theta``.
The guesser either measures projectively along the state axes (the
standard measurement) or along two tilted axes chosen in anticipation of
the wrong answers leaked after the measurement (the anticipative
measurement).  This module builds both setups and knows the exact success
probabilities of all six scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bloch import HermitianOp, Measurement, StateEnsemble, joint_table
from .game import (
    NO_INFO,
    GameSpec,
    PostProcessing,
    all_exclusion_sets,
    bayes_optimal_post,
    exclusion_info_map,
    no_exclusion_map,
    success_no_cpost,
    success_with_cpost,
)

#: Input labels in canonical order; also the answer alphabet.
INPUT_LABELS = ("+a", "-a", "+b", "-b")

#: Outcome labels of the anticipative measurement, mirroring the axis names.
ANTICIPATIVE_OUTCOMES = ("+m", "-m", "+n", "-n")

STANDARD = "standard"
ANTICIPATIVE = "anticipative"
KINDS = (STANDARD, ANTICIPATIVE)

#: Number of answers that can be excluded, per scenario.
K_VALUES = (0, 1, 2)

_THETA_SLACK = 1e-12


def check_theta(theta: float) -> float:
    """Validate the axis angle; the task needs ``0 < theta <= pi/2``."""
    theta = float(theta)
    if not 0.0 < theta <= math.pi / 2 + _THETA_SLACK:
        raise ValueError(f"theta must lie in (0, pi/2], got {theta!r}")
    return theta


@dataclass(frozen=True)
class Scenario:
    """One of the six scenarios: measurement kind plus exclusion count."""

    kind: str
    k: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.k not in K_VALUES:
            raise ValueError(f"k must be one of {K_VALUES}, got {self.k!r}")


SCENARIOS = tuple(Scenario(kind, k) for kind in KINDS for k in K_VALUES)


def theta_grid(
    points: int = 25,
    theta_min: float = math.pi / 50,
    theta_max: float = math.pi / 2,
) -> np.ndarray:
    """Evenly spaced angles; the default grid is ``i * pi/50, i = 1..25``."""
    if points < 1:
        raise ValueError(f"points must be >= 1, got {points}")
    check_theta(theta_min)
    check_theta(theta_max)
    if theta_max < theta_min:
        raise ValueError("theta_max must be >= theta_min")
    if points == 1:
        return np.array([theta_min])
    return np.linspace(theta_min, theta_max, points)


def negate_label(label: str) -> str:
    sign, axis = label[0], label[1:]
    return ("-" if sign == "+" else "+") + axis


def signed_label(axis: str, sign: int) -> str:
    return ("+" if sign > 0 else "-") + axis


def basis_vectors(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit Bloch vectors of the two state axes.

    Both lie in the xy-plane at angles ``+theta/2`` and ``-theta/2`` from
    the symmetry axis, so ``a . b = cos(theta)``.
    """
    theta = check_theta(theta)
    half = theta / 2.0
    a = np.array([math.cos(half), math.sin(half), 0.0])
    b = np.array([math.cos(half), -math.sin(half), 0.0])
    return a, b


def make_ensemble(theta: float) -> StateEnsemble:
    """The four equiprobable pure states ``(I +- a.sigma)/8, (I +- b.sigma)/8``."""
    a, b = basis_vectors(theta)
    vecs = {"+a": a, "-a": -a, "+b": b, "-b": -b}
    return StateEnsemble(
        {x: HermitianOp(0.125, 0.125 * v) for x, v in vecs.items()}
    )


def standard_measurement(theta: float) -> Measurement:
    """Even mixture of the two projective measurements along the state axes.

    Effects ``(I +- a.sigma)/4`` and ``(I +- b.sigma)/4`` with outcome
    labels matching the input labels.
    """
    a, b = basis_vectors(theta)
    vecs = {"+a": a, "-a": -a, "+b": b, "-b": -b}
    return Measurement(
        {z: HermitianOp(0.25, 0.25 * v) for z, v in vecs.items()}
    )


def anticipative_directions(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit axes of the anticipative measurement.

    ``m`` tilts toward ``b``, ``n`` toward ``a``:
    ``m = (a + 3b)/|a + 3b|`` and ``n = (3a + b)/|3a + b|``; both norms are
    ``sqrt(10 + 6 a.b)``.
    """
    a, b = basis_vectors(theta)
    norm = math.sqrt(10.0 + 6.0 * float(a @ b))
    return (a + 3.0 * b) / norm, (3.0 * a + b) / norm


def anticipative_measurement(theta: float) -> Measurement:
    """Even mixture of the projective measurements along ``m`` and ``n``."""
    m, n = anticipative_directions(theta)
    vecs = {"+m": m, "-m": -m, "+n": n, "-n": -n}
    return Measurement(
        {z: HermitianOp(0.25, 0.25 * v) for z, v in vecs.items()}
    )


def measurement_for(kind: str, theta: float) -> Measurement:
    if kind == STANDARD:
        return standard_measurement(theta)
    if kind == ANTICIPATIVE:
        return anticipative_measurement(theta)
    raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


class PQValues(NamedTuple):
    """The four distinct Born probabilities of the anticipative setup.

    ``p_plus``/``p_minus`` pair a state with the tilted axis of the other
    letter (e.g. ``+a`` with ``+-m``), ``q_plus``/``q_minus`` with its own
    (e.g. ``+a`` with ``+-n``).  They satisfy
    ``q_plus >= p_plus >= p_minus >= q_minus`` and sum to ``1/4``.
    """

    p_plus: float
    p_minus: float
    q_plus: float
    q_minus: float


def pq_values(theta: float) -> PQValues:
    theta = check_theta(theta)
    c = math.cos(theta)
    root = math.sqrt(10.0 + 6.0 * c)
    p = (1.0 + 3.0 * c) / root
    q = (c + 3.0) / root
    return PQValues(
        p_plus=(1.0 + p) / 16.0,
        p_minus=(1.0 - p) / 16.0,
        q_plus=(1.0 + q) / 16.0,
        q_minus=(1.0 - q) / 16.0,
    )


def closed_form(scenario: Scenario, theta: float) -> float:
    """Exact success probability of a scenario at angle ``theta``.

    Standard: ``1/2``, ``(3 + cos^2(theta/2))/6``, ``(4 + cos^2(theta/2))/6``
    for ``k = 0, 1, 2``.  Anticipative: ``4 q_plus`` for ``k = 0`` and
    ``(4 + r)/12``, ``(6 + r)/12`` with ``r = sqrt(10 + 6 cos(theta))`` for
    ``k = 1, 2``.
    """
    theta = check_theta(theta)
    if scenario.kind == STANDARD:
        if scenario.k == 0:
            return 0.5
        cos_sq = math.cos(theta / 2.0) ** 2
        return (3.0 + cos_sq) / 6.0 if scenario.k == 1 else (4.0 + cos_sq) / 6.0
    if scenario.k == 0:
        return 4.0 * pq_values(theta).q_plus
    root = math.sqrt(10.0 + 6.0 * math.cos(theta))
    return (4.0 + root) / 12.0 if scenario.k == 1 else (6.0 + root) / 12.0


def priority_table(kind: str) -> dict[str, tuple[str, str, str, str]]:
    """Optimal guessing order per outcome, best answer first.

    Given the leaked set, the optimal guess is the first answer in the
    outcome's row that is not excluded.  Both kinds share the same row
    structure; only the outcome labels differ (each tilted axis ranks the
    states of its nearby axis first).
    """
    rows = {
        "+": ("+a", "+b", "-b", "-a"),
        "-": ("-a", "-b", "+b", "+a"),
    }
    if kind == STANDARD:
        first, second = "a", "b"
    elif kind == ANTICIPATIVE:
        first, second = "n", "m"
    else:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    table = {}
    for sign in ("+", "-"):
        table[sign + first] = rows[sign]
        y0, y1, y2, y3 = rows[sign]
        table[sign + second] = (y1, y0, y3, y2)
    return table


def discrimination_game(kind: str, theta: float) -> GameSpec:
    """State discrimination as a guessing game: answer the input label."""
    ensemble = make_ensemble(theta)
    m = measurement_for(kind, theta)
    return GameSpec(
        inputs=INPUT_LABELS,
        answers=INPUT_LABELS,
        correctness=lambda x, y: x == y,
        joint=joint_table(ensemble, m),
    )


def pipeline_success(scenario: Scenario, theta: float) -> float:
    """Success of the Bayes-optimal strategy, computed from first principles.

    Builds the Born table, the exclusion channel and the optimal
    post-processing, then evaluates the matching success functional.  Must
    agree with :func:`closed_form` to numerical precision.
    """
    game = discrimination_game(scenario.kind, theta)
    if scenario.k == 0:
        alpha = no_exclusion_map(game)
        return success_no_cpost(game, bayes_optimal_post(game, alpha))
    alpha = exclusion_info_map(game, scenario.k)
    return success_with_cpost(game, alpha, bayes_optimal_post(game, alpha))


def priority_post(kind: str, k: int) -> PostProcessing:
    """Deterministic strategy read off the priority table.

    For ``k = 0`` the rule is keyed by the empty set and guesses the head
    of each outcome's row; otherwise it guesses the first answer not in
    the leaked size-``k`` set.  Coincides with the Bayes-optimal strategy
    for every ``theta`` in the task's range.
    """
    if k not in K_VALUES:
        raise ValueError(f"k must be one of {K_VALUES}, got {k!r}")
    table = priority_table(kind)
    rules: dict[tuple[tuple[str, ...], str], dict[str, float]] = {}
    for z, row in table.items():
        if k == 0:
            rules[(NO_INFO, z)] = {row[0]: 1.0}
            continue
        for s in all_exclusion_sets(INPUT_LABELS, k):
            guess = next(y for y in row if y not in s)
            rules[(s, z)] = {guess: 1.0}
    return PostProcessing(rules)
