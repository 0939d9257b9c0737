"""Exact admissibility of every construction, the table and candidate transforms."""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from phmaps.construct import (
    REFERENCE_TABLE,
    HarmonicCandidate,
    build,
    build_even_simple,
    build_higher_order,
    build_hurwitz_odd,
    build_simple,
    build_solid_harmonics,
    n_table,
    reflect_variable,
    rotate,
    same_up_to_signs,
    table_csv,
    verify,
)
from phmaps.errors import DimensionMismatchError, DomainError
from phmaps.hurwitz import base_algebra, restrict
from phmaps.polyalg import Component, MultiPoly, variable


@pytest.mark.parametrize("n", range(2, 9))
def test_simple_family(n):
    h = build_simple(n)
    assert h.N == n * (n - 1)
    assert verify(h).passed


def test_simple_family_in_the_plane_is_the_classical_map(plane_candidate):
    assert same_up_to_signs(build_simple(2), plane_candidate)


@pytest.mark.parametrize("n", range(2, 11, 2))
def test_even_simple_family(n):
    h = build_even_simple(n)
    assert h.N == 1 + n * n // 4
    assert verify(h).passed


@pytest.mark.parametrize("n, N", [(4, 3), (6, 5), (8, 5), (10, 9), (12, 9), (14, 9), (16, 9)])
def test_hurwitz_even(n, N):
    h = build(n, "hurwitz")
    assert h.N == N
    assert verify(h).passed


@pytest.mark.parametrize("n, N", [(3, 5), (5, 8), (7, 12), (9, 14)])
def test_hurwitz_odd(n, N):
    h = build(n, "hurwitz")
    assert h.N == N
    assert verify(h).passed


@pytest.mark.parametrize("n, k", [(2, 2), (2, 3), (2, 4), (4, 2), (4, 3), (4, 4)])
def test_higher_order(n, k):
    h = build_higher_order(n, k)
    assert h.k == k
    assert verify(h).passed


@pytest.mark.parametrize("k", range(1, 6))
def test_solid_harmonics(k):
    h = build_solid_harmonics(k)
    assert (h.n, h.N, h.k) == (3, 2 * k + 1, k)
    assert verify(h).passed


def test_solid_harmonics_of_degree_two_are_the_reference_map(reference_n3):
    assert same_up_to_signs(build(3, "spherical"), reference_n3)
    assert same_up_to_signs(build(3, "spherical", k=2), build(3, "hurwitz"))


def test_spherical_method_is_three_dimensional():
    with pytest.raises(DomainError):
        build(4, "spherical", k=3)
    with pytest.raises(DomainError):
        build_solid_harmonics(0)


def test_higher_order_needs_even_n():
    with pytest.raises(DomainError):
        build(3, "higher", k=2)


def test_small_examples_match_reference_maps(reference_n3, reference_n4, reference_n5):
    assert same_up_to_signs(build(3, "hurwitz"), reference_n3)
    # the reference maps use the conjugate complex table, i.e. x2 -> -x2
    assert same_up_to_signs(reflect_variable(build(4, "hurwitz"), 1), reference_n4)
    assert same_up_to_signs(reflect_variable(build(5, "hurwitz"), 1), reference_n5)
    for h in (reference_n3, reference_n4, reference_n5):
        assert verify(h).passed


def test_odd_builder_rejects_wrong_family():
    with pytest.raises(DimensionMismatchError):
        build_hurwitz_odd(5, restrict(base_algebra(4), 2, 3))


def test_verify_reports_witnesses(plane_candidate):
    c0, c1 = plane_candidate.components
    broken = HarmonicCandidate(2, 2, 2, (c0, c1.with_poly(c1.poly * 3)), "broken")
    report = verify(broken)
    assert report.h1_ok and not report.h2_ok
    assert report.failures() == ["h2", "h3"]
    assert not report.witnesses["h2"]["poly"].is_zero()


def test_verify_detects_non_harmonic_component():
    x, y = variable(2, 0), variable(2, 1)
    h = HarmonicCandidate.from_components([Component.make(x ** 2), Component.make(y ** 2)], k=2)
    report = verify(h)
    assert not report.h1_ok
    assert report.witnesses["h1"]["component"] == 0


def test_padding_preserves_admissibility(plane_candidate):
    h = plane_candidate.pad(5)
    assert h.N == 5
    assert verify(h).passed
    with pytest.raises(DomainError):
        plane_candidate.pad(1)


@given(st.integers(-20, 20), st.integers(1, 20), st.sampled_from([4, 6, 8]))
@settings(max_examples=30, deadline=None)
def test_rotations_preserve_admissibility(a, b, n):
    # (a^2 - b^2, 2ab) / (a^2 + b^2) is a rational point on the circle
    d = a * a + b * b
    h = build(n, "hurwitz")
    mixed = rotate(h, 1, 2, Fraction(a * a - b * b, d), Fraction(2 * a * b, d))
    assert verify(mixed).passed


def test_rotation_needs_unit_vector(plane_candidate):
    with pytest.raises(DomainError):
        rotate(plane_candidate, 0, 1, Fraction(1), Fraction(1))


def test_candidate_shape_checks():
    with pytest.raises(DimensionMismatchError):
        HarmonicCandidate(2, 3, 2, (Component.make(MultiPoly(2)),))
    with pytest.raises(DomainError):
        build(4, "unknown")


@pytest.fixture(scope="module")
def table16():
    return {row.n: row for row in n_table(16)}


def test_table_even_rows(table16):
    assert [table16[n].N_constructed for n in range(2, 17, 2)] == [2, 3, 5, 5, 9, 9, 9, 9]


def test_table_odd_rows(table16):
    assert [table16[n].N_constructed for n in (3, 5, 7, 9)] == [5, 8, 12, 14]


def test_table_reports_reference_and_gaps(table16):
    for n, row in table16.items():
        assert row.N_reference == REFERENCE_TABLE[n]
        assert row.gap == row.N_constructed - row.N_reference


def test_table_csv_format(table16):
    text = table_csv([table16[n] for n in sorted(table16)])
    lines = text.split("\r\n")
    assert lines[0] == "n,N_constructed,N_paper,gap,provenance"
    assert lines[1].startswith("2,2,2,0,hurwitz")
    assert text.endswith("\r\n")


@pytest.mark.slow
def test_table_flags_gap_beyond_the_reference_range():
    rows = {row.n: row for row in n_table(20)}
    assert rows[20].N_reference == 17
    assert rows[20].gap is not None and rows[20].gap > 0
