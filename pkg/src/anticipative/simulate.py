"""Seeded shot-level simulation of the four-state task.

Each run is one circuit: prepare one of the four states, rotate into one
of the two projective bases of the chosen measurement kind, and read out a
bit, optionally through depolarizing noise (applied to the state) followed
by a classical readout flip.  Runs draw their random streams from a
per-run child of the master seed, so any subset of runs can be reproduced
or executed in parallel without touching the others.

Seed lineage: run ``i`` of a plan with master seed ``s`` uses
``numpy.random.SeedSequence(s, spawn_key=(i,))``, where ``i`` is the run's
position in the plan's canonical order (theta, then kind, then state, then
basis).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .game import all_exclusion_sets
from .task import (
    ANTICIPATIVE,
    INPUT_LABELS,
    KINDS,
    STANDARD,
    anticipative_directions,
    basis_vectors,
    check_theta,
    priority_table,
)

#: Projective bases per measurement kind, in canonical order.
KIND_BASES: dict[str, tuple[str, str]] = {
    STANDARD: ("a", "b"),
    ANTICIPATIVE: ("m", "n"),
}

#: Marker basis for runs that draw a basis per shot.
RANDOM_BASIS = "random"

BASIS_MODES = ("even", "per-shot")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing strength plus readout flip probability.

    The default readout error matches the hardware this task was sized
    for; construct ``NoiseModel(0.0, 0.0)`` for ideal statistics.
    """

    depolarizing: float = 0.0
    readout_flip: float = 0.023

    def __post_init__(self) -> None:
        if not 0.0 <= self.depolarizing <= 1.0:
            raise ValueError(
                f"depolarizing strength must lie in [0, 1], got {self.depolarizing!r}"
            )
        if not 0.0 <= self.readout_flip <= 0.5:
            raise ValueError(
                f"readout flip must lie in [0, 0.5], got {self.readout_flip!r}"
            )


NOISELESS = NoiseModel(0.0, 0.0)


@dataclass(frozen=True)
class RunSpec:
    """One circuit: a (theta, kind, state, basis) cell of the plan."""

    index: int
    theta: float
    kind: str
    state: str
    basis: str
    shots: int
    master_seed: int

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master_seed, spawn_key=(self.index,))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed_sequence())


@dataclass(frozen=True, eq=False)
class ExperimentPlan:
    """Full factorial sweep over angles, kinds, states and bases."""

    thetas: tuple[float, ...]
    kinds: tuple[str, ...]
    states: tuple[str, ...]
    shots_per_run: int
    master_seed: int
    basis_mode: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "states", tuple(self.states))
        if not self.thetas:
            raise ValueError("plan needs at least one theta")
        for t in self.thetas:
            check_theta(t)
        for kind in self.kinds:
            if kind not in KIND_BASES:
                raise ValueError(f"unknown kind {kind!r}")
        if self.shots_per_run < 1:
            raise ValueError(f"shots_per_run must be >= 1, got {self.shots_per_run}")
        if self.basis_mode not in BASIS_MODES:
            raise ValueError(f"basis_mode must be one of {BASIS_MODES}")
        runs: list[RunSpec] = []
        for theta in self.thetas:
            for kind in self.kinds:
                for state in self.states:
                    if self.basis_mode == "even":
                        for basis in KIND_BASES[kind]:
                            runs.append(
                                RunSpec(
                                    index=len(runs),
                                    theta=theta,
                                    kind=kind,
                                    state=state,
                                    basis=basis,
                                    shots=self.shots_per_run,
                                    master_seed=self.master_seed,
                                )
                            )
                    else:
                        runs.append(
                            RunSpec(
                                index=len(runs),
                                theta=theta,
                                kind=kind,
                                state=state,
                                basis=RANDOM_BASIS,
                                shots=2 * self.shots_per_run,
                                master_seed=self.master_seed,
                            )
                        )
        object.__setattr__(self, "runs", tuple(runs))

    def __len__(self) -> int:
        return len(self.runs)


def plan_experiment(
    thetas: Iterable[float],
    shots: int = 20000,
    seed: int = 0,
    kinds: Iterable[str] = KINDS,
    basis_mode: str = "even",
) -> ExperimentPlan:
    """Build the canonical plan: every state and basis at every angle.

    In the default even mode each basis of a kind gets its own run of
    ``shots`` shots, so a two-kind plan has ``len(thetas) * 4 * 2 * 2``
    runs.  In per-shot mode the basis is drawn per shot instead and each
    (theta, kind, state) cell is a single run of ``2 * shots`` shots.
    """
    return ExperimentPlan(
        thetas=tuple(thetas),
        kinds=tuple(kinds),
        states=INPUT_LABELS,
        shots_per_run=shots,
        master_seed=seed,
        basis_mode=basis_mode,
    )


def state_vector(theta: float, state: str) -> np.ndarray:
    a, b = basis_vectors(theta)
    return {"+a": a, "-a": -a, "+b": b, "-b": -b}[state]


def basis_direction(theta: float, kind: str, basis: str) -> np.ndarray:
    """Unit vector of the ``+`` outcome of a projective basis."""
    if kind == STANDARD:
        a, b = basis_vectors(theta)
        pair = {"a": a, "b": b}
    elif kind == ANTICIPATIVE:
        m, n = anticipative_directions(theta)
        pair = {"m": m, "n": n}
    else:
        raise ValueError(f"unknown kind {kind!r}")
    try:
        return pair[basis]
    except KeyError:
        raise ValueError(f"kind {kind!r} has bases {tuple(pair)}, got {basis!r}") from None


@dataclass(frozen=True)
class AngleSchedule:
    """Rotation angles of one circuit, both measured in the state plane.

    ``preparation`` is the in-plane angle of the prepared state;
    ``measurement`` is the angle of the measured basis axis, so the
    pre-readout rotation is their difference.
    """

    preparation: float
    measurement: float


def state_angle(theta: float, state: str) -> float:
    """In-plane angle of a state: ``+-theta/2`` plus ``pi`` for antipodes."""
    check_theta(theta)
    base = {"a": theta / 2.0, "b": -theta / 2.0}[state[1]]
    return base if state[0] == "+" else base + math.pi


def tilt_angle(theta: float) -> float:
    """Opening angle between the anticipative axes: ``m . n = cos(omega)``.

    Equals ``arccos((3 + 5 cos(theta)) / (5 + 3 cos(theta)))``.
    """
    theta = check_theta(theta)
    c = math.cos(theta)
    return math.acos((3.0 + 5.0 * c) / (5.0 + 3.0 * c))


def measurement_angle(theta: float, kind: str, basis: str) -> float:
    """In-plane angle of the measured axis.

    Standard runs rotate by ``+theta/2`` (basis ``a``) or ``-theta/2``
    (basis ``b``); anticipative runs by ``+omega/2`` (basis ``n``) or
    ``-omega/2`` (basis ``m``).
    """
    check_theta(theta)
    if kind == STANDARD:
        try:
            return {"a": theta / 2.0, "b": -theta / 2.0}[basis]
        except KeyError:
            raise ValueError(f"standard bases are ('a', 'b'), got {basis!r}") from None
    if kind == ANTICIPATIVE:
        omega = tilt_angle(theta)
        try:
            return {"n": omega / 2.0, "m": -omega / 2.0}[basis]
        except KeyError:
            raise ValueError(
                f"anticipative bases are ('m', 'n'), got {basis!r}"
            ) from None
    raise ValueError(f"unknown kind {kind!r}")


def angle_schedule(
    theta: float, kind: str, basis: str, state: str = "+a"
) -> AngleSchedule:
    """Angles of the circuit measuring ``basis`` on a given prepared state."""
    return AngleSchedule(
        preparation=state_angle(theta, state),
        measurement=measurement_angle(theta, kind, basis),
    )


def outcome_probability(
    theta: float, state: str, kind: str, basis: str, noise: NoiseModel = NOISELESS
) -> float:
    """Probability of recording the ``+`` outcome of the basis.

    Depolarizing noise contracts the state's Bloch vector before the Born
    rule; the readout flip then mixes the recorded bit.
    """
    u = basis_direction(theta, kind, basis)
    x = state_vector(theta, state)
    p_true = 0.5 * (1.0 + (1.0 - noise.depolarizing) * float(x @ u))
    eps = noise.readout_flip
    return p_true * (1.0 - 2.0 * eps) + eps


@dataclass(frozen=True)
class ShotRecord:
    """One readout: the circuit cell, the raw bit and its outcome label."""

    theta: float
    state: str
    kind: str
    basis: str
    outcome: int
    label: str
    master_seed: int
    run_index: int


RECORD_FIELDS = (
    "theta",
    "state",
    "kind",
    "basis",
    "outcome",
    "label",
    "master_seed",
    "run_index",
)


class RunResult(Sequence):
    """Outcomes of one run, exposed as a lazy sequence of shot records.

    Bit 0 means the ``+`` outcome of the shot's basis.  Per-shot-basis
    runs also store which basis each shot drew.
    """

    def __init__(
        self,
        run: RunSpec,
        noise: NoiseModel,
        outcomes: np.ndarray,
        bases: np.ndarray | None = None,
    ) -> None:
        self.run = run
        self.noise = noise
        self.outcomes = outcomes
        self.bases = bases
        outcomes.setflags(write=False)
        if bases is not None:
            bases.setflags(write=False)

    def __len__(self) -> int:
        return len(self.outcomes)

    def basis_label(self, i: int) -> str:
        if self.bases is None:
            return self.run.basis
        return KIND_BASES[self.run.kind][self.bases[i]]

    def __getitem__(self, i: int) -> ShotRecord:
        if not -len(self) <= i < len(self):
            raise IndexError(i)
        i %= len(self)
        basis = self.basis_label(i)
        bit = int(self.outcomes[i])
        return ShotRecord(
            theta=self.run.theta,
            state=self.run.state,
            kind=self.run.kind,
            basis=basis,
            outcome=bit,
            label=("+" if bit == 0 else "-") + basis,
            master_seed=self.run.master_seed,
            run_index=self.run.index,
        )

    def tallies(self) -> dict[str, tuple[int, int]]:
        """Per-basis ``(plus_count, total)`` pairs."""
        if self.bases is None:
            total = len(self.outcomes)
            plus = int(total - self.outcomes.sum())
            return {self.run.basis: (plus, total)}
        out: dict[str, tuple[int, int]] = {}
        for idx, basis in enumerate(KIND_BASES[self.run.kind]):
            mask = self.bases == idx
            total = int(mask.sum())
            plus = int(total - self.outcomes[mask].sum())
            out[basis] = (plus, total)
        return out


def sample_run(
    run: RunSpec, noise: NoiseModel = NOISELESS, rng: np.random.Generator | None = None
) -> RunResult:
    """Sample every shot of a run.

    The stream layout is fixed: per-shot basis draws (per-shot mode only),
    then one uniform per shot against the Born probability, then one
    uniform per shot for the readout flip.  Identical inputs give
    bit-identical outcomes.
    """
    if rng is None:
        rng = run.rng()
    eps = noise.readout_flip
    if run.basis == RANDOM_BASIS:
        bases = rng.integers(0, 2, size=run.shots).astype(np.uint8)
        pair = KIND_BASES[run.kind]
        p_plus = np.where(
            bases == 0,
            outcome_probability(run.theta, run.state, run.kind, pair[0], noise),
            outcome_probability(run.theta, run.state, run.kind, pair[1], noise),
        )
    else:
        bases = None
        p_plus = outcome_probability(run.theta, run.state, run.kind, run.basis, noise)
    born = rng.random(run.shots) >= p_plus
    flips = rng.random(run.shots) < eps
    outcomes = (born ^ flips).astype(np.uint8)
    return RunResult(run, noise, outcomes, bases)


@dataclass(frozen=True)
class Estimate:
    """Empirical success estimate with a binomial-bound standard error."""

    value: float
    stderr: float
    shots: int


def success_weights(kind: str, k: int) -> dict[tuple[str, str], float]:
    """Exact per-shot success weight ``w(outcome label, prepared state)``.

    A shot with outcome ``z`` and state ``x`` wins against a uniformly
    drawn exclusion set exactly when the first non-excluded answer in the
    outcome's priority row is ``x``; the weight is that winning fraction,
    averaged exactly over all admissible sets.  Multiplying weights by
    observed frequencies reuses every shot for each ``k``.
    """
    table = priority_table(kind)
    weights: dict[tuple[str, str], float] = {}
    for x in INPUT_LABELS:
        wrong = tuple(y for y in INPUT_LABELS if y != x)
        sets = all_exclusion_sets(wrong, k) if k > 0 else ((),)
        for z, row in table.items():
            wins = sum(
                1 for s in sets if next(y for y in row if y not in s) == x
            )
            weights[(z, x)] = wins / len(sets)
    return weights


def _group_runs(
    results: Iterable[RunResult],
) -> dict[tuple[float, str], list[RunResult]]:
    groups: dict[tuple[float, str], list[RunResult]] = {}
    for res in results:
        groups.setdefault((res.run.theta, res.run.kind), []).append(res)
    return groups


def empirical_success(
    results: Iterable[RunResult], k: int, require_equal_split: bool = True
) -> dict[tuple[float, str], Estimate]:
    """Per-(theta, kind) success estimates for exclusion count ``k``.

    Pools the shots of a group, scores them with the exact weights from
    :func:`success_weights` and bounds the standard error by the binomial
    formula (the weights lie in [0, 1], so the bound is conservative).
    Fixed-basis groups must cover both bases of their kind with equal shot
    counts; per-shot-basis runs are exempt because their balance is
    stochastic by design.
    """
    out: dict[tuple[float, str], Estimate] = {}
    for (theta, kind), group in _group_runs(results).items():
        weights = success_weights(kind, k)
        expected_bases = set(KIND_BASES[kind])
        per_state: dict[str, dict[str, int]] = {}
        score = 0.0
        shots = 0
        fixed_basis_group = all(res.bases is None for res in group)
        for res in group:
            state = res.run.state
            totals = per_state.setdefault(state, {})
            for basis, (plus, total) in res.tallies().items():
                totals[basis] = totals.get(basis, 0) + total
                score += plus * weights[("+" + basis, state)]
                score += (total - plus) * weights[("-" + basis, state)]
                shots += total
        if require_equal_split and fixed_basis_group:
            for state, totals in per_state.items():
                if set(totals) != expected_bases or len(set(totals.values())) != 1:
                    raise ValueError(
                        f"unbalanced basis counts for theta={theta!r}, "
                        f"kind={kind!r}, state={state!r}: {totals!r}"
                    )
        value = score / shots
        stderr = math.sqrt(max(value * (1.0 - value), 0.0) / shots)
        out[(theta, kind)] = Estimate(value=value, stderr=stderr, shots=shots)
    return out


def exact_success(
    theta: float, kind: str, k: int, noise: NoiseModel = NOISELESS
) -> float:
    """Infinite-shot limit of the estimator, noise included.

    With no noise this equals the closed-form success probability of the
    scenario, which pins the estimator to the analytic layer.
    """
    weights = success_weights(kind, k)
    total = 0.0
    for state in INPUT_LABELS:
        for basis in KIND_BASES[kind]:
            p_plus = outcome_probability(theta, state, kind, basis, noise)
            total += 0.125 * (
                p_plus * weights[("+" + basis, state)]
                + (1.0 - p_plus) * weights[("-" + basis, state)]
            )
    return total


def simulate_curves(
    plan: ExperimentPlan,
    noise: NoiseModel = NOISELESS,
    ks: tuple[int, ...] = (0, 1, 2),
) -> dict[tuple[float, str, int], Estimate]:
    """Sample the whole plan and estimate every scenario on it."""
    results = [sample_run(run, noise) for run in plan.runs]
    curves: dict[tuple[float, str, int], Estimate] = {}
    for k in ks:
        for (theta, kind), est in empirical_success(results, k).items():
            curves[(theta, kind, k)] = est
    return curves


def write_records(results: Iterable[RunResult], path: str) -> int:
    """Dump every shot as CSV with a header row; returns the record count."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(RECORD_FIELDS) + "\n")
        for res in results:
            for rec in res:
                fh.write(
                    f"{rec.theta:.12g},{rec.state},{rec.kind},{rec.basis},"
                    f"{rec.outcome},{rec.label},{rec.master_seed},{rec.run_index}\n"
                )
                count += 1
    return count


def _ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(angle: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]], dtype=complex
    )


_SQRT_X = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)


def native_decomposition_check(theta: float, tol: float = 1e-12) -> bool:
    """Verify the native-gate decomposition of the plane rotation.

    Checks ``RY(theta) = i . sqrt(X) . RZ(pi - theta) . sqrt(X) . RZ(pi)``
    up to a global phase.  This is the only place complex matrices appear
    in the simulator.
    """
    lhs = _ry(theta)
    rhs = 1j * (_SQRT_X @ _rz(math.pi - theta) @ _SQRT_X @ _rz(math.pi))
    flat = np.argmax(np.abs(rhs))
    phase = lhs.flat[flat] / rhs.flat[flat]
    if abs(abs(phase) - 1.0) > tol:
        return False
    return bool(np.all(np.abs(lhs - phase * rhs) <= tol))
