"""Optimal anticipative measurements via an auxiliary discrimination problem.

Fixing the best guessing strategy (guess the drawn input unless it is
excluded, then fall back along a known order) turns the search for the
best measurement into minimum-error discrimination of an auxiliary
ensemble indexed by outcome functions ``phi``: maps sending each possible
exclusion set to a guess.  Every member of that ensemble is a mix of task
states, so the best discrimination success ``Lambda`` is found by brute
force over all ``phi``, and measurements are optimal iff they satisfy an
exact eigenvalue-style certificate.  The two-effect measurements built
here pass it and average to the four-outcome anticipative measurement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .bloch import (
    DEFAULT_TOL,
    HermitianOp,
    Measurement,
    operator_product,
    projector,
)
from .game import ExclusionSet, PostProcessing, all_exclusion_sets
from .task import (
    INPUT_LABELS,
    basis_vectors,
    check_theta,
    make_ensemble,
    negate_label,
    signed_label,
)

#: Exclusion counts the solver supports.
SOLVER_K = (1, 2)

#: Tolerance on the unnormalized score when collecting maximizers.
GAMMA_TOL = 1e-9


def exclusion_sets(k: int) -> tuple[ExclusionSet, ...]:
    """Canonically ordered size-``k`` subsets of the answer alphabet."""
    if k not in SOLVER_K:
        raise ValueError(f"k must be one of {SOLVER_K}, got {k!r}")
    return all_exclusion_sets(INPUT_LABELS, k)


@dataclass(frozen=True)
class OutcomeFunction:
    """A guess ``phi(S)`` for every possible exclusion set ``S``.

    Stored as an ordered tuple of ``(S, guess)`` pairs so instances are
    hashable and can label measurement outcomes.
    """

    items: tuple[tuple[ExclusionSet, str], ...]

    def __call__(self, s: ExclusionSet) -> str:
        for key, guess in self.items:
            if key == s:
                return guess
        raise KeyError(f"no exclusion set {s!r} in domain")

    @property
    def sets(self) -> tuple[ExclusionSet, ...]:
        return tuple(key for key, _ in self.items)

    @property
    def choices(self) -> tuple[str, ...]:
        return tuple(guess for _, guess in self.items)

    def __repr__(self) -> str:
        body = ", ".join(f"{''.join(s)}->{x}" for s, x in self.items)
        return f"OutcomeFunction({body})"


def _function_from_choices(
    sets: tuple[ExclusionSet, ...], choices: Iterable[str]
) -> OutcomeFunction:
    return OutcomeFunction(tuple(zip(sets, choices)))


@lru_cache(maxsize=None)
def enumerate_functions(k: int) -> tuple[OutcomeFunction, ...]:
    """All ``4^|T|`` outcome functions, in lexicographic label order.

    ``|T| = 4`` for ``k = 1`` and ``6`` for ``k = 2``, so the counts are
    256 and 4096.
    """
    sets = exclusion_sets(k)
    return tuple(
        _function_from_choices(sets, choices)
        for choices in itertools.product(INPUT_LABELS, repeat=len(sets))
    )


@dataclass(frozen=True)
class CountVector:
    """How often ``phi`` guesses each state while that guess is allowed.

    ``alpha_plus`` counts sets ``S`` with ``phi(S) = +a`` and ``+a`` not in
    ``S``, and so on.  Guesses of an excluded answer never score and are
    not counted.
    """

    alpha_plus: int
    alpha_minus: int
    beta_plus: int
    beta_minus: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.alpha_plus, self.alpha_minus, self.beta_plus, self.beta_minus)

    @property
    def total(self) -> int:
        return sum(self.as_tuple())

    def is_feasible(self, k: int) -> bool:
        """Combinatorial bounds obeyed by every actual outcome function."""
        if any(not 0 <= c <= 3 for c in self.as_tuple()):
            return False
        if k == 1:
            return self.total <= 4
        if k == 2:
            return (
                self.total <= 6
                and self.alpha_plus + self.beta_plus <= 5
                and self.alpha_minus + self.beta_minus <= 5
            )
        raise ValueError(f"k must be one of {SOLVER_K}, got {k!r}")


_COUNT_SLOT = {"+a": 0, "-a": 1, "+b": 2, "-b": 3}


def counts(phi: OutcomeFunction, k: int) -> CountVector:
    """Count vector of ``phi`` (the domain must match ``exclusion_sets(k)``)."""
    if phi.sets != exclusion_sets(k):
        raise ValueError(f"outcome function domain does not match k = {k}")
    slots = [0, 0, 0, 0]
    for s, guess in phi.items:
        if guess not in s:
            slots[_COUNT_SLOT[guess]] += 1
    return CountVector(*slots)


def gamma(c: CountVector, inner_product: float) -> float:
    """Unnormalized discrimination score of a count vector.

    ``total + sqrt(da^2 + db^2 + 2 da db (a.b))`` with ``da, db`` the
    signed count differences along the two axes.  Monotone in each count,
    which is what makes the constrained maxima easy to read off.
    """
    if not -1.0 <= inner_product <= 1.0:
        raise ValueError(f"inner product must lie in [-1, 1], got {inner_product!r}")
    da = c.alpha_plus - c.alpha_minus
    db = c.beta_plus - c.beta_minus
    radicand = da * da + db * db + 2.0 * da * db * inner_product
    return c.total + float(np.sqrt(max(radicand, 0.0)))


@dataclass(frozen=True, eq=False)
class AuxiliaryEnsemble:
    """The ensemble ``{e(phi)}`` whose discrimination solves the game.

    ``members[phi]`` is proportional to a count-weighted mix of task
    states; ``normalization`` is the constant ``C`` that makes the traces
    sum to one; ``lambda_max`` is the best single-member score
    ``max_phi (scalar + |bloch|)``; ``delta`` is the overall scale linking
    the game value to the discrimination value.
    """

    members: Mapping[OutcomeFunction, HermitianOp]
    normalization: float
    lambda_max: float
    inner_product: float
    delta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", dict(self.members))

    @property
    def k(self) -> int:
        phi = next(iter(self.members))
        return len(phi.sets[0])

    def total_trace(self) -> float:
        return sum(op.trace for op in self.members.values())


def member_score(op: HermitianOp) -> float:
    """Discrimination score of one member: its largest eigenvalue."""
    return op.scalar + op.bloch_norm


@lru_cache(maxsize=None)
def _count_vectors(k: int) -> tuple[CountVector, ...]:
    return tuple(counts(phi, k) for phi in enumerate_functions(k))


def build_auxiliary(theta: float, k: int) -> AuxiliaryEnsemble:
    """Construct the auxiliary ensemble for the four-state task.

    Each member is ``(total * I + (da a + db b).sigma) / (24 C)`` where
    the counts come from :func:`counts` and ``C`` is fixed by unit total
    trace: ``C = 64`` for ``k = 1`` and ``C = 1024`` for ``k = 2``.
    """
    theta = check_theta(theta)
    if k not in SOLVER_K:
        raise ValueError(f"k must be one of {SOLVER_K}, got {k!r}")
    a, b = basis_vectors(theta)
    ip = float(a @ b)
    functions = enumerate_functions(k)
    vectors = _count_vectors(k)
    grand_total = sum(c.total for c in vectors)
    # Unit total trace forces 12 C = sum of all counts.
    c_norm = grand_total / 12.0
    scale = 1.0 / (24.0 * c_norm)
    members: dict[OutcomeFunction, HermitianOp] = {}
    best = 0.0
    for phi, c in zip(functions, vectors):
        da = c.alpha_plus - c.alpha_minus
        db = c.beta_plus - c.beta_minus
        op = HermitianOp(c.total * scale, (da * a + db * b) * scale)
        members[phi] = op
        best = max(best, member_score(op))
    ensemble = make_ensemble(theta)
    delta = sum(ensemble[x].trace for x in ensemble.inputs)
    return AuxiliaryEnsemble(
        members=members,
        normalization=c_norm,
        lambda_max=best,
        inner_product=ip,
        delta=delta,
    )


def lambda_argmax(
    aux: AuxiliaryEnsemble, tol: float = GAMMA_TOL
) -> tuple[float, frozenset[OutcomeFunction]]:
    """Best member score and the set of members attaining it.

    The tie tolerance applies on the unnormalized (gamma) scale, where
    distinct scores are well separated; degenerate geometries such as
    ``a . b = 0`` then report every maximizer.
    """
    scale = 24.0 * aux.normalization
    best = max(member_score(op) for op in aux.members.values())
    winners = frozenset(
        phi
        for phi, op in aux.members.items()
        if member_score(op) * scale >= best * scale - tol
    )
    return best, winners


def _fallback_chain(k: int, primary: str, secondary: str) -> dict[ExclusionSet, str]:
    """Guess the primary state, fall back to the secondary, then its opposite."""
    chain = (primary, secondary, negate_label(secondary))
    rule: dict[ExclusionSet, str] = {}
    for s in exclusion_sets(k):
        rule[s] = next(y for y in chain if y not in s)
    return rule


def fallback_function(k: int, sign: int, order: str, flip_a: bool = False) -> OutcomeFunction:
    """The outcome function attached to one effect of the paired measurement.

    ``order = "ab"`` prefers the ``a`` axis and falls back to ``b``;
    ``order = "ba"`` swaps the roles.  ``flip_a`` replaces ``a`` with its
    antipode, which yields the extra maximizers at ``a . b = 0``.
    """
    if order not in ("ab", "ba"):
        raise ValueError(f"order must be 'ab' or 'ba', got {order!r}")
    a_label = signed_label("a", -sign if flip_a else sign)
    b_label = signed_label("b", sign)
    primary, secondary = (a_label, b_label) if order == "ab" else (b_label, a_label)
    rule = _fallback_chain(k, primary, secondary)
    sets = exclusion_sets(k)
    return _function_from_choices(sets, (rule[s] for s in sets))


def paired_measurement(
    theta: float, k: int, order: str, flip_a: bool = False
) -> Measurement:
    """Two-effect optimal measurement with outcome-function labels.

    For ``order = "ab"`` the effects project onto ``+-(3a + b)/|3a + b|``
    and are labelled by the fallback functions preferring ``+-a``; for
    ``order = "ba"`` the direction is ``(a + 3b)/|a + 3b|`` preferring
    ``+-b``.  All remaining outcome functions implicitly carry the zero
    effect.
    """
    theta = check_theta(theta)
    a, b = basis_vectors(theta)
    if flip_a:
        a = -a
    axis = 3.0 * a + b if order == "ab" else a + 3.0 * b
    axis = axis / np.linalg.norm(axis)
    plus = fallback_function(k, +1, order, flip_a)
    minus = fallback_function(k, -1, order, flip_a)
    return Measurement({plus: projector(axis), minus: projector(-axis)})


def certificate_residual(aux: AuxiliaryEnsemble, m: Measurement) -> float:
    """Largest component of ``e(phi) M(phi) - Lambda M(phi)`` over effects.

    The optimality condition demands the operator product itself (not just
    its Hermitian part) vanish on every effect actually used, so the
    residual tracks real and imaginary Pauli components.
    """
    lam = aux.lambda_max
    worst = 0.0
    for phi, effect in m.effects.items():
        try:
            member = aux.members[phi]
        except KeyError:
            raise ValueError(
                f"measurement outcome {phi!r} is not an outcome function "
                f"for k = {aux.k}"
            ) from None
        s, v = operator_product(member, effect)
        s -= lam * effect.scalar
        v = v - lam * effect.bloch
        worst = max(worst, abs(s), float(np.max(np.abs(v))))
    return worst


def certify_optimal(
    aux: AuxiliaryEnsemble, m: Measurement, tol: float = DEFAULT_TOL
) -> bool:
    """Exact optimality test for a discrimination measurement.

    True iff ``m`` is a valid measurement and every effect satisfies
    ``e(phi) M(phi) = Lambda M(phi)`` within ``tol``.  Outcome functions
    without an entry in ``m`` carry the zero effect and pass trivially.
    """
    report = m.validate(tol)
    if not report:
        return False
    return certificate_residual(aux, m) <= tol


def convex_combination(
    measurements: Iterable[Measurement], weights: Iterable[float] | None = None
) -> Measurement:
    """Outcome-wise convex mix of measurements over a shared label space."""
    measurements = list(measurements)
    if weights is None:
        weights = [1.0 / len(measurements)] * len(measurements)
    weights = list(weights)
    if len(weights) != len(measurements) or abs(sum(weights) - 1.0) > DEFAULT_TOL:
        raise ValueError("weights must match the measurements and sum to 1")
    mixed: dict = {}
    for w, m in zip(weights, measurements):
        for label, effect in m.effects.items():
            if label in mixed:
                mixed[label] = mixed[label] + w * effect
            else:
                mixed[label] = w * effect
    return Measurement(mixed)


def projection_post(k: int, outcomes: Iterable[OutcomeFunction]) -> PostProcessing:
    """The canonical strategy on function-labelled outcomes: guess ``phi(S)``."""
    rules: dict[tuple[ExclusionSet, OutcomeFunction], dict[str, float]] = {}
    for phi in outcomes:
        for s in exclusion_sets(k):
            rules[(s, phi)] = {phi(s): 1.0}
    return PostProcessing(rules)


def reduce_to_povm(
    aux: AuxiliaryEnsemble,
    m_ab: Measurement,
    m_ba: Measurement,
    tol: float = DEFAULT_TOL,
) -> tuple[Measurement, PostProcessing]:
    """Average the two paired measurements into the four-outcome POVM.

    Outcomes relabel as ``phi_ab(+-) -> +-n`` and ``phi_ba(+-) -> +-m``;
    the returned post-processing guesses what the underlying outcome
    function dictates, which reproduces the priority-table strategy.  Both
    inputs must pass the optimality certificate.
    """
    k = aux.k
    for name, m in (("m_ab", m_ab), ("m_ba", m_ba)):
        if not certify_optimal(aux, m, tol):
            raise ValueError(f"{name} does not certify as optimal")
    layout = {
        "+n": (m_ab, fallback_function(k, +1, "ab")),
        "-n": (m_ab, fallback_function(k, -1, "ab")),
        "+m": (m_ba, fallback_function(k, +1, "ba")),
        "-m": (m_ba, fallback_function(k, -1, "ba")),
    }
    effects: dict[str, HermitianOp] = {}
    rules: dict[tuple[ExclusionSet, str], dict[str, float]] = {}
    for label in ("+m", "-m", "+n", "-n"):
        m, phi = layout[label]
        try:
            effects[label] = 0.5 * m.effects[phi]
        except KeyError:
            raise ValueError(
                f"expected outcome function {phi!r} among {label!r} effects"
            ) from None
        for s in exclusion_sets(k):
            rules[(s, label)] = {phi(s): 1.0}
    return Measurement(effects), PostProcessing(rules)


def anticipative_success(aux: AuxiliaryEnsemble) -> float:
    """Game value from the discrimination value: ``2 C Lambda``."""
    return 2.0 * aux.normalization * aux.lambda_max


def tampered(aux: AuxiliaryEnsemble, factor: float = 1.01) -> AuxiliaryEnsemble:
    """Scale all members without rescaling ``lambda_max`` (test hook).

    The result violates the certificate for every previously optimal
    measurement; used to exercise failure paths.
    """
    members = {phi: factor * op for phi, op in aux.members.items()}
    return replace(aux, members=members)
