"""Tests for exact polynomial arithmetic and components."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phmaps.errors import DimensionMismatchError, DomainError
from phmaps.polyalg import (
    Component,
    MultiPoly,
    add,
    component_square_sum,
    constant,
    eval_poly,
    euler_operator,
    gradient,
    is_homogeneous,
    laplacian,
    monomials,
    mul,
    partial,
    radial_power,
    rational_sqrt,
    stack_components,
    variable,
)

NVARS = 3

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
exponents = st.tuples(*[st.integers(0, 3)] * NVARS)
polys = st.dictionaries(exponents, coeffs, max_size=5).map(lambda t: MultiPoly(NVARS, t))


def homogeneous_polys(k):
    exps = st.tuples(st.integers(0, k), st.integers(0, k)).filter(lambda e: e[0] + e[1] <= k)
    return st.dictionaries(exps.map(lambda e: (e[0], e[1], k - e[0] - e[1])), coeffs, max_size=6).map(
        lambda t: MultiPoly(NVARS, t)
    )


def test_zero_terms_are_dropped():
    p = MultiPoly(2, {(1, 0): 1, (0, 1): 0})
    assert len(p) == 1
    assert (p - p).is_zero()
    assert (p - p).degree() == -1


def test_mismatched_exponent_length_raises():
    with pytest.raises(DimensionMismatchError):
        MultiPoly(2, {(1, 0, 0): 1})


def test_add_and_mul_reject_different_nvars():
    with pytest.raises(DimensionMismatchError):
        add(variable(2, 0), variable(3, 0))
    with pytest.raises(DimensionMismatchError):
        mul(variable(2, 0), variable(3, 0))


def test_partial_of_monomial():
    x, y = variable(2, 0), variable(2, 1)
    p = x ** 3 * y ** 2
    assert partial(p, 0) == x ** 2 * y ** 2 * 3
    assert partial(p, 1) == x ** 3 * y * 2
    with pytest.raises(DomainError):
        partial(p, 2)


def test_laplacian_of_plane_harmonics():
    x, y = variable(2, 0), variable(2, 1)
    assert laplacian(x ** 2 - y ** 2).is_zero()
    assert laplacian(x * y * 2).is_zero()
    assert laplacian(x ** 2) == constant(2, 2)


def test_euler_operator_scales_homogeneous_polynomials():
    x = [variable(3, i) for i in range(3)]
    p = x[0] ** 2 * x[1] - x[2] ** 3 * Fraction(1, 2)
    assert euler_operator(p) == p * 3


def test_radial_power():
    x, y = variable(2, 0), variable(2, 1)
    assert radial_power(2, 4) == (x ** 2 + y ** 2) ** 2
    assert radial_power(2, 0) == 1
    with pytest.raises(DomainError):
        radial_power(2, 3)
    with pytest.raises(DomainError):
        radial_power(2, -2)


def test_is_homogeneous():
    x, y = variable(2, 0), variable(2, 1)
    assert is_homogeneous(x * y, 2)
    assert not is_homogeneous(x * y + x, None)
    assert not is_homogeneous(x * y, 3)
    assert is_homogeneous(MultiPoly(2))


def test_eval_exact_and_float():
    x, y = variable(2, 0), variable(2, 1)
    p = x ** 2 * Fraction(1, 3) - y
    assert eval_poly(p, [Fraction(3), Fraction(1, 2)], exact=True) == Fraction(5, 2)
    assert eval_poly(p, [3.0, 0.5]) == pytest.approx(2.5, abs=1e-15)
    with pytest.raises(DimensionMismatchError):
        eval_poly(p, [1.0])


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(52) is None
    assert rational_sqrt(-1) is None


def test_component_make_extracts_square_factors():
    x = variable(2, 0)
    c = Component.make(x, Fraction(1, 2), 12)
    assert (c.scale, c.radicand) == (Fraction(1), 3)
    assert c.square() == x ** 2 * 3
    with pytest.raises(DomainError):
        Component(Fraction(1), 0, x)


def test_component_square_sum_of_plane_map():
    x, y = variable(2, 0), variable(2, 1)
    comps = [Component.make(x ** 2 - y ** 2), Component.make(x * y * 2)]
    assert component_square_sum(comps) == radial_power(2, 4)


def test_stacked_components_match_pointwise_evaluation():
    x, y = variable(2, 0), variable(2, 1)
    comps = [Component.make(x ** 2 - y ** 2, Fraction(1, 2), 3), Component.make(x * y * 2)]
    E, C = stack_components(comps)
    pts = np.array([[0.3, -1.2], [2.0, 0.5]])
    vals = monomials(pts, E) @ C
    for row, pt in zip(vals, pts):
        expected = [c.factor * eval_poly(c.poly, pt) for c in comps]
        np.testing.assert_allclose(row, expected, rtol=1e-14)


@given(polys, polys, polys)
@settings(max_examples=100, deadline=None)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == MultiPoly(NVARS)


@given(polys, polys, st.integers(0, NVARS - 1))
@settings(max_examples=100, deadline=None)
def test_product_rule(a, b, i):
    assert partial(a * b, i) == partial(a, i) * b + a * partial(b, i)


@given(polys)
@settings(max_examples=50, deadline=None)
def test_laplacian_is_trace_of_second_derivatives(a):
    total = MultiPoly(NVARS)
    for i, d in enumerate(gradient(a)):
        total = total + partial(d, i)
    assert laplacian(a) == total


@given(st.integers(1, 4).flatmap(lambda k: st.tuples(st.just(k), homogeneous_polys(k))))
@settings(max_examples=50, deadline=None)
def test_euler_identity_on_random_homogeneous(args):
    k, p = args
    assert euler_operator(p) == p * k


rational_points = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=5)] * NVARS)


@given(polys, polys)
@settings(max_examples=100, deadline=None)
def test_laplacian_of_a_product(a, b):
    cross = MultiPoly(NVARS)
    for da, db in zip(gradient(a), gradient(b)):
        cross = cross + da * db
    assert laplacian(a * b) == b * laplacian(a) + a * laplacian(b) + cross * 2


@given(
    st.integers(2, 5).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.integers(0, 4),
            st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n),
        )
    )
)
@settings(max_examples=100, deadline=None)
def test_radial_power_evaluates_to_a_power_of_the_norm(args):
    n, k, x = args
    sq = sum(v * v for v in x)
    assert eval_poly(radial_power(n, 2 * k), x) == pytest.approx(sq ** k, rel=1e-12, abs=1e-300)
    exact_x = [Fraction(v) for v in x]
    assert eval_poly(radial_power(n, 2 * k), exact_x, exact=True) == sum(v * v for v in exact_x) ** k


@given(polys, polys, rational_points)
@settings(max_examples=100, deadline=None)
def test_evaluation_is_a_ring_homomorphism(a, b, x):
    def ev(p):
        return eval_poly(p, x, exact=True)

    assert ev(a + b) == ev(a) + ev(b)
    assert ev(a * b) == ev(a) * ev(b)
    assert ev(a - b) == ev(a) - ev(b)
    assert ev(constant(NVARS, 1)) == 1
