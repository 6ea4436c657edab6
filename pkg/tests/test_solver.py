"""Enumeration solver: counts, scores, certificates, reduction."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anticipative.bloch import IDENTITY, Measurement, joint_table
from anticipative.game import GameSpec, exclusion_info_map, success_with_cpost
from anticipative.solver import (
    CountVector,
    OutcomeFunction,
    anticipative_success,
    build_auxiliary,
    certificate_residual,
    certify_optimal,
    convex_combination,
    counts,
    enumerate_functions,
    exclusion_sets,
    gamma,
    lambda_argmax,
    projection_post,
    reduce_to_povm,
    tampered,
    fallback_function,
    paired_measurement,
)
from anticipative.task import (
    ANTICIPATIVE,
    Scenario,
    anticipative_measurement,
    basis_vectors,
    closed_form,
    discrimination_game,
    make_ensemble,
    priority_post,
    theta_grid,
)
from anticipative.task import INPUT_LABELS

from matrix_oracle import to_matrix


def constant_function(k: int, label: str) -> OutcomeFunction:
    return OutcomeFunction(tuple((s, label) for s in exclusion_sets(k)))


class TestEnumeration:
    def test_function_counts(self):
        assert len(enumerate_functions(1)) == 256
        assert len(enumerate_functions(2)) == 4096

    def test_domain_sizes(self):
        assert len(exclusion_sets(1)) == 4
        assert len(exclusion_sets(2)) == 6

    def test_unsupported_k(self):
        with pytest.raises(ValueError):
            enumerate_functions(3)
        with pytest.raises(ValueError):
            exclusion_sets(0)

    def test_functions_unique_and_total(self):
        functions = enumerate_functions(1)
        assert len(set(functions)) == 256
        phi = functions[0]
        assert phi.choices == ("+a", "+a", "+a", "+a")
        with pytest.raises(KeyError):
            phi(("+a", "-a"))


class TestCounts:
    def test_constant_function(self):
        # +a is excluded by one of the four singleton sets
        assert counts(constant_function(1, "+a"), 1).as_tuple() == (3, 0, 0, 0)

    def test_preferred_fallback_k1(self):
        assert counts(fallback_function(1, +1, "ab"), 1).as_tuple() == (3, 0, 1, 0)
        assert counts(fallback_function(1, -1, "ab"), 1).as_tuple() == (0, 3, 0, 1)
        assert counts(fallback_function(1, +1, "ba"), 1).as_tuple() == (1, 0, 3, 0)

    def test_preferred_fallback_k2(self):
        assert counts(fallback_function(2, +1, "ab"), 2).as_tuple() == (3, 0, 2, 1)
        assert counts(fallback_function(2, -1, "ab"), 2).as_tuple() == (0, 3, 1, 2)
        assert counts(fallback_function(2, +1, "ba"), 2).as_tuple() == (2, 1, 3, 0)
        assert counts(fallback_function(2, -1, "ba"), 2).as_tuple() == (1, 2, 0, 3)

    def test_domain_mismatch_rejected(self):
        with pytest.raises(ValueError, match="domain"):
            counts(constant_function(1, "+a"), 2)

    def test_all_enumerated_counts_feasible(self):
        for k in (1, 2):
            for phi in enumerate_functions(k):
                assert counts(phi, k).is_feasible(k)

    def test_feasibility_bounds(self):
        assert not CountVector(4, 0, 0, 0).is_feasible(1)
        assert not CountVector(3, 2, 0, 0).is_feasible(1)
        assert CountVector(3, 0, 1, 0).is_feasible(1)
        assert not CountVector(3, 0, 3, 1).is_feasible(2)
        assert CountVector(3, 0, 2, 1).is_feasible(2)


class TestGamma:
    def test_frozen_examples(self):
        assert gamma(CountVector(3, 0, 1, 0), 0.0) == pytest.approx(
            7.16227766016838, abs=1e-12
        )
        assert gamma(CountVector(3, 0, 2, 1), 0.0) == pytest.approx(
            9.16227766016838, abs=1e-12
        )
        assert gamma(CountVector(3, 0, 0, 1), 0.5) == pytest.approx(
            6.6457513110645907, abs=1e-12
        )

    def test_balanced_counts_have_no_bloch_gain(self):
        assert gamma(CountVector(1, 1, 1, 1), 0.3) == pytest.approx(4.0, abs=1e-15)

    @given(
        st.integers(0, 3),
        st.integers(0, 3),
        st.integers(0, 3),
        st.integers(0, 3),
        st.floats(0.0, 1.0, allow_nan=False),
    )
    def test_matches_vector_norm(self, ap, am, bp, bm, ip):
        # the score is total plus the norm of the summed Bloch deviation
        theta = math.acos(ip)
        a, b = basis_vectors(theta) if 0 < theta <= math.pi / 2 else (None, None)
        if a is None:
            return
        c = CountVector(ap, am, bp, bm)
        vec = (ap - am) * a + (bp - bm) * b
        expected = c.total + np.linalg.norm(vec)
        assert gamma(c, float(a @ b)) == pytest.approx(expected, abs=1e-9)

    def test_bad_inner_product(self):
        with pytest.raises(ValueError):
            gamma(CountVector(1, 0, 0, 0), 1.5)


class TestBuildAuxiliary:
    def test_normalization_constants(self):
        assert build_auxiliary(1.0, 1).normalization == pytest.approx(64.0)
        assert build_auxiliary(1.0, 2).normalization == pytest.approx(1024.0)

    def test_unit_total_trace(self):
        for k in (1, 2):
            aux = build_auxiliary(0.7, k)
            assert aux.total_trace() == pytest.approx(1.0, abs=1e-12)
            assert aux.delta == pytest.approx(1.0, abs=1e-12)

    def test_members_positive(self):
        aux = build_auxiliary(1.3, 1)
        assert all(op.is_positive() for op in aux.members.values())

    def test_member_scores_match_matrix_eigenvalues(self):
        aux = build_auxiliary(0.9, 1)
        rng = np.random.default_rng(3)
        members = list(aux.members.values())
        for idx in rng.integers(0, len(members), size=20):
            op = members[idx]
            top = np.linalg.eigvalsh(to_matrix(op))[-1]
            assert op.scalar + op.bloch_norm == pytest.approx(top, abs=1e-13)

    def test_theta_domain(self):
        with pytest.raises(ValueError):
            build_auxiliary(0.0, 1)
        with pytest.raises(ValueError):
            build_auxiliary(math.pi, 1)
        with pytest.raises(ValueError):
            build_auxiliary(1.0, 3)


class TestLambdaArgmax:
    def test_brute_force_equality_on_grid(self):
        for k in (1, 2):
            for theta in theta_grid(7):
                aux = build_auxiliary(theta, k)
                best, winners = lambda_argmax(aux)
                brute = max(
                    gamma(counts(phi, k), aux.inner_product)
                    for phi in enumerate_functions(k)
                )
                assert 24.0 * aux.normalization * best == pytest.approx(
                    brute, abs=1e-12
                )
                assert winners

    def test_generic_maximizers_are_the_four_fallback_functions(self):
        for k in (1, 2):
            aux = build_auxiliary(1.0, k)
            _, winners = lambda_argmax(aux)
            expected = {
                fallback_function(k, sign, order)
                for sign in (+1, -1)
                for order in ("ab", "ba")
            }
            assert winners == expected

    def test_orthogonal_axes_double_the_maximizers(self):
        for k in (1, 2):
            aux = build_auxiliary(math.pi / 2, k)
            _, winners = lambda_argmax(aux)
            expected = {
                fallback_function(k, sign, order, flip_a=flip)
                for sign in (+1, -1)
                for order in ("ab", "ba")
                for flip in (False, True)
            }
            assert winners == expected
            assert len(winners) == 8

    def test_small_angle_limit(self):
        aux = build_auxiliary(1e-6, 1)
        assert 24.0 * aux.normalization * aux.lambda_max == pytest.approx(
            8.0, abs=1e-11
        )

    def test_success_values_match_closed_forms(self):
        for k in (1, 2):
            for theta in theta_grid(7):
                aux = build_auxiliary(theta, k)
                assert anticipative_success(aux) == pytest.approx(
                    closed_form(Scenario(ANTICIPATIVE, k), theta), abs=1e-12
                )


class TestTheoremMeasurement:
    def test_valid_and_projective(self):
        for k in (1, 2):
            m = paired_measurement(1.2, k, "ab")
            assert m.validate().valid
            assert len(m) == 2
            for effect in m.effects.values():
                assert effect.eigenvalues() == pytest.approx((0.0, 1.0), abs=1e-15)

    def test_directions(self):
        theta = 0.8
        a, b = basis_vectors(theta)
        m_ab = paired_measurement(theta, 1, "ab")
        axis = (3 * a + b) / np.linalg.norm(3 * a + b)
        plus = m_ab[fallback_function(1, +1, "ab")]
        assert np.allclose(plus.bloch, 0.5 * axis, atol=1e-15)
        m_ba = paired_measurement(theta, 1, "ba")
        axis = (a + 3 * b) / np.linalg.norm(a + 3 * b)
        plus = m_ba[fallback_function(1, +1, "ba")]
        assert np.allclose(plus.bloch, 0.5 * axis, atol=1e-15)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            paired_measurement(1.0, 1, "xy")


class TestCertificates:
    def test_paired_measurements_certify(self):
        for k in (1, 2):
            for theta in (0.1, 0.9, math.pi / 2):
                aux = build_auxiliary(theta, k)
                m_ab = paired_measurement(theta, k, "ab")
                m_ba = paired_measurement(theta, k, "ba")
                assert certify_optimal(aux, m_ab)
                assert certify_optimal(aux, m_ba)
                mix = convex_combination([m_ab, m_ba])
                assert certify_optimal(aux, mix)
                assert certificate_residual(aux, mix) <= 1e-12

    def test_flipped_variant_only_at_orthogonal_axes(self):
        flipped = paired_measurement(math.pi / 2, 1, "ab", flip_a=True)
        aux = build_auxiliary(math.pi / 2, 1)
        assert certify_optimal(aux, flipped)
        aux = build_auxiliary(1.0, 1)
        flipped = paired_measurement(1.0, 1, "ab", flip_a=True)
        assert not certify_optimal(aux, flipped)

    def test_non_maximizing_support_fails(self):
        # all mass on a constant function, which never maximizes
        aux = build_auxiliary(0.5, 1)
        lazy = Measurement({constant_function(1, "+a"): IDENTITY})
        assert not certify_optimal(aux, lazy)

    def test_invalid_measurement_fails(self):
        aux = build_auxiliary(0.5, 1)
        phi = fallback_function(1, +1, "ab")
        assert not certify_optimal(aux, Measurement({phi: IDENTITY * 0.5}))

    def test_unknown_outcome_label_rejected(self):
        aux = build_auxiliary(0.5, 1)
        with pytest.raises(ValueError, match="not an outcome function"):
            certificate_residual(aux, Measurement({"stray": IDENTITY}))

    def test_tampered_ensemble_fails(self):
        aux = tampered(build_auxiliary(0.5, 1))
        assert not certify_optimal(aux, paired_measurement(0.5, 1, "ab"))

    def test_certified_success_through_game_evaluation(self):
        # evaluating the paired measurement with the canonical strategy
        # recovers 2 C Lambda exactly
        for k in (1, 2):
            for theta in (0.6, math.pi / 2):
                aux = build_auxiliary(theta, k)
                m_ab = paired_measurement(theta, k, "ab")
                m_ba = paired_measurement(theta, k, "ba")
                mix = convex_combination([m_ab, m_ba])
                spec = GameSpec(
                    INPUT_LABELS,
                    INPUT_LABELS,
                    lambda x, y: x == y,
                    joint_table(make_ensemble(theta), mix),
                )
                alpha = exclusion_info_map(spec, k)
                nu = projection_post(k, mix.outcomes)
                got = success_with_cpost(spec, alpha, nu)
                assert got == pytest.approx(anticipative_success(aux), abs=1e-12)


class TestReduction:
    def test_matches_four_outcome_measurement(self):
        for k in (1, 2):
            for theta in (0.3, 1.0, math.pi / 2):
                aux = build_auxiliary(theta, k)
                povm, nu = reduce_to_povm(
                    aux,
                    paired_measurement(theta, k, "ab"),
                    paired_measurement(theta, k, "ba"),
                )
                reference = anticipative_measurement(theta)
                assert povm.outcomes == reference.outcomes
                for z in reference.outcomes:
                    assert povm[z].allclose(reference[z], tol=1e-12)
                assert nu.rules == priority_post(ANTICIPATIVE, k).rules

    def test_reduced_strategy_achieves_solver_value(self):
        for k in (1, 2):
            theta = 0.9
            aux = build_auxiliary(theta, k)
            povm, nu = reduce_to_povm(
                aux,
                paired_measurement(theta, k, "ab"),
                paired_measurement(theta, k, "ba"),
            )
            game = discrimination_game(ANTICIPATIVE, theta)
            alpha = exclusion_info_map(game, k)
            got = success_with_cpost(game, alpha, nu)
            assert got == pytest.approx(anticipative_success(aux), abs=1e-12)

    def test_uncertified_inputs_rejected(self):
        aux = tampered(build_auxiliary(0.7, 1))
        with pytest.raises(ValueError, match="does not certify"):
            reduce_to_povm(
                aux,
                paired_measurement(0.7, 1, "ab"),
                paired_measurement(0.7, 1, "ba"),
            )

    def test_swapped_inputs_rejected(self):
        aux = build_auxiliary(0.7, 1)
        m_ab = paired_measurement(0.7, 1, "ab")
        with pytest.raises(ValueError, match="expected outcome function"):
            reduce_to_povm(aux, m_ab, m_ab)
