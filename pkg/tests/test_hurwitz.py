"""Tests for Hurwitz families, composition rules and the planner."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phmaps.errors import DimensionMismatchError, DomainError
from phmaps.hurwitz import (
    HurwitzFamily,
    asymptotic_family,
    asymptotic_t_bound,
    base_algebra,
    best_t,
    direct_sum,
    double,
    family_for,
    hurwitz_radon_number,
    plan_swap,
    random_derivation,
    replay,
    restrict,
    swap,
    trivial_plan,
)


@pytest.mark.parametrize("dim", [1, 2, 4, 8])
def test_base_algebras_are_valid(dim):
    F = base_algebra(dim)
    assert F.triple == (dim, dim, dim)
    assert F.matrix_equations_hold()
    assert F.polynomial_identity_holds()


def test_complex_table_layout():
    F = base_algebra(2)
    assert np.array_equal(F.matrices[1], np.array([[0, -1], [1, 0]], dtype=object))


def test_base_algebra_rejects_other_dimensions():
    with pytest.raises(DomainError):
        base_algebra(3)


def test_norm_identity_numerically():
    F = base_algebra(8)
    rng = np.random.default_rng(0)
    x, y = rng.standard_normal(8), rng.standard_normal(8)
    assert np.linalg.norm(F.evaluate(x, y)) == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y), rel=1e-12)


def test_restrict_swap_and_sum_shapes():
    F = base_algebra(4)
    assert restrict(F, 3, 2).triple == (3, 2, 4)
    assert swap(restrict(F, 3, 2)).triple == (2, 3, 4)
    G = direct_sum(restrict(F, 2, 4), restrict(F, 1, 4))
    assert G.triple == (3, 4, 8)
    for fam in (restrict(F, 3, 2), swap(restrict(F, 3, 2)), G):
        assert fam.matrix_equations_hold()
        assert fam.polynomial_identity_holds()


def test_direct_sum_needs_equal_s():
    with pytest.raises(DimensionMismatchError):
        direct_sum(base_algebra(2), base_algebra(4))


def test_restrict_out_of_range():
    with pytest.raises(DomainError):
        restrict(base_algebra(2), 3, 1)


def test_double_of_complex_and_quaternions():
    assert double(base_algebra(2)).triple == (4, 4, 4)
    F = double(base_algebra(4))
    assert F.triple == (6, 8, 8)
    assert F.matrix_equations_hold()


def test_double_needs_square_family():
    with pytest.raises(DimensionMismatchError):
        double(restrict(base_algebra(4), 2, 3))


def test_invalid_family_fails_equations():
    bad = HurwitzFamily.from_matrices([np.eye(2, dtype=int), np.eye(2, dtype=int)])
    assert not bad.matrix_equations_hold()
    assert not bad.polynomial_identity_holds()


@pytest.mark.parametrize("n, rho", [(1, 1), (2, 2), (4, 4), (8, 8), (16, 9), (32, 10), (64, 12), (12, 4)])
def test_hurwitz_radon_number(n, rho):
    assert hurwitz_radon_number(n) == rho


@pytest.mark.parametrize("r, s, t", [(2, 2, 2), (3, 3, 4), (4, 4, 4), (8, 8, 8)])
def test_best_t_reference_values(r, s, t):
    assert best_t(r, s)[0] == t


@pytest.mark.parametrize("m", [5, 6, 7, 8])
def test_best_t_between_five_and_eight(m):
    assert best_t(m, m)[0] == 8


def test_best_t_is_symmetric_and_bounded_by_trivial():
    for r in range(1, 7):
        for s in range(1, 7):
            t, plan = best_t(r, s)
            assert t == best_t(s, r)[0]
            assert max(r, s) <= t <= r * s
            assert plan.triple == (r, s, t)


def test_family_for_replays_a_valid_family():
    F = family_for(6)
    assert F.triple == (6, 6, 8)
    assert F.polynomial_identity_holds()


def test_trivial_plan():
    plan = trivial_plan(3, 2)
    assert plan.triple == (3, 2, 6)
    assert replay(plan).matrix_equations_hold()
    assert plan_swap(plan_swap(plan)) == plan


def test_asymptotic_family():
    F = asymptotic_family(2, 3)
    assert F.triple == (12, 8, 16)
    assert F.matrix_equations_hold()
    a, k, t = asymptotic_t_bound(12)
    assert 2 * a * k >= 12 and 2 ** k >= 12 and t == a * 2 ** k


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=500, deadline=None)
def test_random_derivations_are_valid(seed):
    plan = random_derivation(np.random.default_rng(seed), max_rs=10, max_t=64)
    assert plan.r <= 10 and plan.s <= 10 and plan.t <= 64
    F = replay(plan)
    assert F.triple == plan.triple
    assert F.matrix_equations_hold()
    assert F.polynomial_identity_holds()
