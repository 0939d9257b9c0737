"""Finite-difference oracle: gradients, residuals, convergence and controls."""
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from phmaps.construct import build
from phmaps.errors import DomainError
from phmaps.numeric import (
    FDConfig,
    convergence_order,
    fd_gradient,
    fd_inflap_residual,
    fd_plap_residual,
    gradient_norm_samples,
    residual_convergence_order,
    run_oracle,
    sample_points,
    scaled_residual,
)
from phmaps.pharmonic import analytic_gradient, assemble, infinity_map

X2 = np.array([0.8, -0.6])
X3 = np.array([0.6, -0.5, 0.9])


def test_config_validation():
    with pytest.raises(ValidationError):
        FDConfig(r_min=2.0, r_max=1.0)
    with pytest.raises(ValidationError):
        FDConfig(outer_order=3)
    with pytest.raises(ValidationError):
        FDConfig(outer_step=0.3)
    with pytest.raises(ValidationError):
        FDConfig(residual_levels=4)


def test_config_from_settings_ignores_missing_overrides():
    cfg = FDConfig.from_settings(step=None, seed=7)
    assert cfg.seed == 7
    assert cfg.step == FDConfig().step


def test_sample_points_lie_in_the_annulus(fd_config):
    X = sample_points(3, fd_config)
    radii = np.linalg.norm(X, axis=1)
    assert X.shape == (fd_config.sample_count, 3)
    assert np.all(radii >= fd_config.r_min) and np.all(radii <= fd_config.r_max)
    np.testing.assert_array_equal(X, sample_points(3, fd_config))


def test_points_near_the_origin_are_rejected(plane_candidate, fd_config):
    u = assemble(plane_candidate, 3)
    with pytest.raises(DomainError):
        fd_gradient(u, [0.1, 0.1], fd_config)
    with pytest.raises(DomainError):
        fd_plap_residual(u, [0.1, 0.1], 3.0, fd_config)


def test_plap_residual_needs_finite_p(plane_candidate, fd_config):
    u = infinity_map(plane_candidate)
    with pytest.raises(DomainError):
        fd_plap_residual(u, X2, float("inf"), fd_config)


def test_fd_gradient_matches_the_analytic_gradient(reference_n3, fd_config):
    u = assemble(reference_n3, 3)
    np.testing.assert_allclose(fd_gradient(u, X3, fd_config), analytic_gradient(u, X3), rtol=1e-7, atol=1e-8)


def test_central_difference_is_second_order(reference_n3):
    u = assemble(reference_n3, 3)
    assert 1.8 < convergence_order(u, X3, reference=analytic_gradient(u, X3)) < 2.2
    assert 1.8 < convergence_order(u, X3) < 2.2


def test_divergence_is_second_order(plane_candidate):
    u = assemble(plane_candidate, 3)
    assert 1.7 < residual_convergence_order(u, X2, 3.0) < 2.3


def test_quadratic_map_at_p2_is_exact_up_to_rounding(plane_candidate):
    u = assemble(plane_candidate, 2)
    cfg = FDConfig(step=1e-2, outer_step=1e-1)
    assert np.max(np.abs(fd_plap_residual(u, X2, 2.0, cfg))) < 1e-9


@pytest.mark.parametrize(
    "candidate, p",
    [
        ("plane_candidate", Fraction(3, 2)),
        ("plane_candidate", 3),
        ("reference_n3", 10),
        ("reference_n5", 4),
        ("linear_candidate", 4),
    ],
)
def test_oracle_accepts_p_harmonic_maps(request, candidate, p, fd_config):
    u = assemble(request.getfixturevalue(candidate), p)
    report = run_oracle(u, fd_config)
    assert report.kind == "plap"
    assert report.passed, report.max_residual
    assert len(report.per_point) == fd_config.sample_count


def test_oracle_accepts_a_higher_degree_map(fd_config):
    u = assemble(build(4, "higher", k=3), Fraction(5, 2))
    assert run_oracle(u, fd_config.model_copy(update={"sample_count": 20})).passed


def test_wrong_exponent_is_rejected(plane_candidate, fd_config):
    u = assemble(plane_candidate, 3)
    v = u.with_gamma(u.profile.gamma + 0.1)
    report = run_oracle(v, fd_config)
    assert not report.passed
    assert report.max_residual > 1e-2
    g, K, p = v.profile.gamma, v.profile.K, 3.0
    Q = abs(v.profile.quadratic_residual())
    r = g * p - p - g - 2
    assert report.residual_exponent == pytest.approx(r, rel=1e-15)
    # |residual| = (g^2 + K)^((p - 2)/2) |Q(g)| |x|^(r + k)
    for pt in report.per_point:
        radius = np.linalg.norm(pt.x)
        expected = (g * g + K) ** ((p - 2) / 2) * Q * radius ** (r + 2) / (1 + radius ** r)
        assert pt.scaled == pytest.approx(expected, rel=1e-6)
    # relative to |A(grad u)| / |x| the residual of a wrong exponent is constant in x
    assert report.max_relative == pytest.approx(Q / np.sqrt(g * g + K), rel=1e-6)


def test_scaled_residual_divides_by_one_plus_a_radial_power():
    assert scaled_residual(np.array([3.0, 4.0]), [0.0, 2.0], 1.0) == pytest.approx(5.0 / 3.0)
    assert scaled_residual(np.array([3.0, 4.0]), [0.0, 2.0], -1.0) == pytest.approx(5.0 / 1.5)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("p", [Fraction(3, 2), 2, 3, 10])
def test_oracle_accepts_hurwitz_maps_across_exponents(n, p, fd_config):
    u = assemble(build(n, "hurwitz"), p)
    report = run_oracle(u, fd_config)
    assert report.passed, report.max_residual
    assert report.max_residual < 1e-4
    assert len(report.per_point) == 100
    bad = run_oracle(u.with_gamma(u.profile.gamma + 0.1), fd_config.model_copy(update={"sample_count": 10}))
    assert bad.max_residual > 1e-2


@pytest.mark.parametrize("candidate, expected", [("plane_candidate", 5.0), ("reference_n3", 7.0)])
def test_oracle_accepts_infinity_maps(request, candidate, expected, fd_config):
    u = infinity_map(request.getfixturevalue(candidate))
    report = run_oracle(u, fd_config)
    assert report.kind == "inflap"
    assert report.passed, report.max_residual
    assert report.gradient_norm_expected == expected
    assert report.gradient_norm_mean == pytest.approx(expected, abs=1e-8)
    assert report.gradient_norm_variance < 1e-10


def _infinity_candidate(n, k):
    return build(3, "spherical", k=k) if n == 3 else build(n, "higher", k=k)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("k", [2, 3])
def test_oracle_accepts_higher_degree_infinity_maps(n, k, fd_config):
    u = infinity_map(_infinity_candidate(n, k))
    report = run_oracle(u, fd_config)
    K = k * (k + n - 2)
    assert report.kind == "inflap"
    assert report.passed, report.max_residual
    assert report.max_residual < 1e-6
    assert report.gradient_norm_mean == pytest.approx(1 + K, abs=1e-8)
    assert report.gradient_norm_variance < 1e-10


def test_inflap_residual_detects_a_wrong_exponent(plane_candidate, accurate_fd_config):
    u = infinity_map(plane_candidate).with_gamma(1.2)
    assert np.linalg.norm(fd_inflap_residual(u, X2, accurate_fd_config)) > 1e-2


def test_gradient_norm_is_constant_for_infinity_maps(reference_n5, accurate_fd_config):
    u = infinity_map(reference_n5)
    sq = gradient_norm_samples(u, sample_points(5, accurate_fd_config)[:10], accurate_fd_config)
    np.testing.assert_allclose(sq, 1.0 + u.profile.K, rtol=1e-10)


def test_p_equal_one_is_skipped(reference_n3, fd_config):
    report = run_oracle(assemble(reference_n3, 1), fd_config)
    assert report.kind == "skipped"
    assert report.passed
    assert report.per_point == []


def test_oracle_is_deterministic_for_a_fixed_seed(plane_candidate):
    u = assemble(plane_candidate, 3)
    cfg = FDConfig(sample_count=10, seed=5)
    a, b = run_oracle(u, cfg), run_oracle(u, cfg)
    assert [pt.residual for pt in a.per_point] == [pt.residual for pt in b.per_point]
    other = run_oracle(u, FDConfig(sample_count=10, seed=6))
    assert [pt.x for pt in a.per_point] != [pt.x for pt in other.per_point]
