"""Regularity curves, figure CSV output and the monotonicity observations."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phmaps.errors import DomainError
from phmaps.pharmonic import gamma
from phmaps.regularity import (
    CSV_HEADER,
    FIGURES,
    alpha_scalar_2d,
    check_A,
    check_B,
    curve_points,
    emit_curves,
    nu_cubic,
    tau_example,
    tau_quadratic,
    tau_scalar,
    theta_grid,
)


def test_alpha_scalar_2d():
    assert alpha_scalar_2d(2, exact=True) == Fraction(1)
    assert alpha_scalar_2d(2) == pytest.approx(1.0)
    assert alpha_scalar_2d("inf", exact=True) == Fraction(1, 3)
    assert alpha_scalar_2d(1e9) == pytest.approx(1 / 3, abs=1e-6)
    with pytest.raises(DomainError):
        alpha_scalar_2d(1)


def test_tau_scalar_endpoints():
    np.testing.assert_allclose(tau_scalar([0.0, 0.5, 1.0]), [1 / 3, 0.5, 1 / 3], rtol=1e-15)


@pytest.mark.parametrize("n", [2, 2048])
def test_tau_example_at_p_equal_two(n):
    assert float(tau_example(n, 0.5)) == pytest.approx(0.5, rel=1e-14)


def test_tau_example_matches_the_exponent_profile():
    for n in (2, 3, 7):
        for p in (Fraction(3, 2), 3, 10):
            assert float(tau_example(n, 1 / float(p))) == pytest.approx(gamma(n, 2, p).tau, rel=1e-12)


@given(st.integers(2, 5000), st.floats(0.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_tau_example_solves_its_quadratic(n, theta):
    tau = tau_example(n, theta)
    assert abs(float(tau_quadratic(n, theta, tau))) <= 1e-12 * n * n
    assert tau >= -1e-15


def test_tau_example_approaches_the_limit():
    for theta in (0.25, 0.5, 0.75):
        assert float(tau_example(10**6, theta)) == pytest.approx(1 - theta, abs=1e-4)
        gaps = [abs(float(tau_example(n, theta)) - (1 - theta)) for n in (2, 8, 32, 128, 512, 2048)]
        assert np.all(np.diff(gaps) <= 1e-15)


def test_theta_grid():
    np.testing.assert_array_equal(theta_grid(5), [0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(DomainError):
        theta_grid(1)


@pytest.mark.parametrize("figure", sorted(FIGURES))
def test_curve_points_cover_every_series(figure):
    rows = curve_points(figure, 11)
    assert len(rows) == 11 * len(FIGURES[figure])
    assert [r.series for r in rows[: len(FIGURES[figure])]] == list(FIGURES[figure])
    thetas = [r.theta for r in rows]
    assert thetas == sorted(thetas)


def test_unknown_figure():
    with pytest.raises(DomainError):
        curve_points("nope", 5)


def test_emit_curves_csv():
    text = emit_curves("conjectures", 3)
    lines = text.split("\r\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[-1] == ""
    assert len(lines) == 2 + 3 * len(FIGURES["conjectures"])
    # A(grad u) has no finite exponent at theta = 0
    assert "0,A,regularity,,inf" in lines


def test_emit_curves_tags_example_dimensions():
    rows = emit_curves("R2R2", 2).split("\r\n")[1:-1]
    example_rows = [r for r in rows if r.split(",")[1].startswith("example_n")]
    assert {r.split(",")[3] for r in example_rows} == {"2", "3", "4"}


def test_nu_cubic_factorisation():
    assert nu_cubic(Fraction(3, 4)) == Fraction(1, 32)
    assert nu_cubic(1) == 0
    assert nu_cubic(Fraction(1, 2)) == 0
    for t in (Fraction(k, 97) for k in range(49, 97)):
        assert nu_cubic(t) == (t - 1) ** 2 * (2 * t - 1)


@pytest.fixture(scope="module")
def observations_b():
    return check_B()


@pytest.mark.parametrize("name", ["B1", "B2", "B3", "B4", "B5"])
def test_map_observations_hold(observations_b, name):
    assert observations_b[name].passed, observations_b[name].details


def test_b3_surrogate_gaps_shrink(observations_b):
    for entry in observations_b["B3"].details["surrogate"]:
        assert entry["gaps"][-1] < 1e-5


def test_planar_maps_sit_above_nu_equal_one(observations_b):
    assert observations_b["B5"].details["n2_nu_ge_1"]


def test_check_b_rejects_bad_dimensions():
    with pytest.raises(DomainError):
        check_B(n_range=[1, 2])


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "A4", "A5"])
def test_scalar_observations_hold(name):
    assert check_A()[name].passed


def test_v_regularity_bottoms_out_at_one():
    assert check_A()["A5"].details["min_V"] == pytest.approx(1.0, abs=1e-5)
    assert not math.isnan(check_A(points=10)["A5"].details["min_V"])
