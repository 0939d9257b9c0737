"""Finite-difference oracle for the p-Laplace and infinity-Laplace residuals.

Maps are only ever evaluated pointwise through :meth:`PMap.evaluate_many`;
no symbolic derivative of h is used here. Gradients follow the convention
``(grad u)[i, j] = d_i u_j`` (rows are domain directions) and the divergence
is taken column-wise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from phmaps.config import settings
from phmaps.errors import DomainError
from phmaps.logger import get_logger
from phmaps.pharmonic import PMap, is_infinite

logger = get_logger(__name__)

# first-derivative stencils: (offsets, weights), derivative = sum(w * f(x + o H)) / H
_STENCILS = {
    2: ((-1.0, 1.0), (-0.5, 0.5)),
    4: ((-2.0, -1.0, 1.0, 2.0), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
    6: ((-3.0, -2.0, -1.0, 1.0, 2.0, 3.0), (-1 / 60, 9 / 60, -45 / 60, 45 / 60, -9 / 60, 1 / 60)),
}


class FDConfig(BaseModel):
    """Finite-difference and sampling parameters."""

    step: float = Field(1e-5, gt=0, description="Central-difference step of fd_gradient")
    richardson: bool = Field(False, description="Richardson-extrapolate fd_gradient")
    residual_step: float = Field(2e-2, gt=0, description="Inner gradient step of the residual oracles")
    residual_levels: int = Field(2, ge=0, le=3, description="Richardson levels of the inner gradient")
    outer_step: float = Field(2e-2, gt=0, description="Step of the outer divergence difference")
    outer_order: int = Field(6, description="Accuracy order of the outer difference (2, 4 or 6)")
    sample_count: int = Field(100, ge=1)
    r_min: float = Field(0.5, gt=0)
    r_max: float = Field(2.0, gt=0)
    seed: int = 42
    residual_tol: float = Field(1e-4, gt=0)
    inflap_tol: float = Field(1e-6, gt=0)

    @model_validator(mode="after")
    def _check_annulus(self) -> "FDConfig":
        if not self.r_min < self.r_max:
            raise ValueError(f"annulus needs r_min < r_max, got ({self.r_min}, {self.r_max})")
        if self.outer_order not in _STENCILS:
            raise ValueError(f"outer_order must be one of {sorted(_STENCILS)}")
        offsets, _ = _STENCILS[self.outer_order]
        reach = max(offsets) * self.outer_step + max(self.step, self.residual_step)
        if reach >= self.r_min:
            raise ValueError("finite-difference steps must be much smaller than r_min")
        return self

    @classmethod
    def from_settings(cls, **overrides) -> "FDConfig":
        values = dict(
            step=settings.FD_STEP,
            residual_step=settings.FD_RESIDUAL_STEP,
            outer_step=settings.FD_OUTER_STEP,
            sample_count=settings.FD_POINTS,
            r_min=settings.FD_R_MIN,
            r_max=settings.FD_R_MAX,
            seed=settings.PHARMONIC_SEED,
            residual_tol=settings.FD_RESIDUAL_TOL,
            inflap_tol=settings.FD_INFLAP_TOL,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def sample_points(n: int, cfg: FDConfig) -> np.ndarray:
    """``sample_count`` points in the annulus ``r_min <= |x| <= r_max``; fixed by ``seed``."""
    rng = np.random.default_rng(cfg.seed)
    directions = rng.standard_normal((cfg.sample_count, n))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    radii = rng.uniform(cfg.r_min, cfg.r_max, size=cfg.sample_count)
    return directions * radii[:, None]


def _check_point(x: np.ndarray, cfg: FDConfig) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError(f"expected a single point, got shape {x.shape}")
    if np.linalg.norm(x) < cfg.r_min:
        raise DomainError(f"|x|={np.linalg.norm(x):.3g} is inside r_min={cfg.r_min}; too close to the origin")
    return x


def _central(u: PMap, X: np.ndarray, h: float) -> np.ndarray:
    """Central-difference gradients at the rows of ``X``; shape ``(M, n, N)``."""
    M, n = X.shape
    shifts = h * np.eye(n)
    stencil = np.stack([X[:, None, :] + shifts[None], X[:, None, :] - shifts[None]])
    values = u.evaluate_many(stencil.reshape(-1, n)).reshape(2, M, n, u.N)
    return (values[0] - values[1]) / (2 * h)


def _gradients(u: PMap, X: np.ndarray, step: float, levels: int) -> np.ndarray:
    """Central differences at ``step, step/2, ...`` combined by ``levels`` Richardson rounds."""
    table = [_central(u, X, step / 2 ** i) for i in range(levels + 1)]
    for j in range(1, levels + 1):
        w = 4 ** j
        table = [(w * fine - coarse) / (w - 1) for coarse, fine in zip(table, table[1:])]
    return table[0]


def _oracle_gradients(u: PMap, X: np.ndarray, cfg: FDConfig) -> np.ndarray:
    return _gradients(u, X, cfg.residual_step, cfg.residual_levels)


def fd_gradient(u: PMap, x: Sequence[float], cfg: FDConfig) -> np.ndarray:
    """``n x N`` finite-difference gradient of ``u`` at ``x``.

    Raises:
        DomainError: if ``|x| < cfg.r_min``.
    """
    x = _check_point(x, cfg)
    return _gradients(u, x[None, :], cfg.step, int(cfg.richardson))[0]


def _outer_points(x: np.ndarray, cfg: FDConfig) -> tuple[np.ndarray, np.ndarray]:
    """Stencil points ``x + o H e_j`` with shape ``(S, n, n)`` and the weights."""
    offsets, weights = _STENCILS[cfg.outer_order]
    n = x.shape[0]
    H = cfg.outer_step
    pts = np.stack([x[None, :] + o * H * np.eye(n) for o in offsets])
    return pts, np.asarray(weights) / H


def _stress(G: np.ndarray, p: float) -> np.ndarray:
    """A(G) = |G|^(p - 2) G with the Frobenius norm over the last two axes."""
    norm = np.sqrt(np.sum(G * G, axis=(-2, -1)))
    return (norm ** (p - 2))[..., None, None] * G


def fd_plap_residual(u: PMap, x: Sequence[float], p: float, cfg: FDConfig) -> np.ndarray:
    """``-div(|grad u|^(p-2) grad u)`` at ``x`` by nested differences; an N-vector."""
    if is_infinite(p) or float(p) <= 1:
        raise DomainError(f"the p-Laplace residual needs p in (1, inf), got {p}")
    x = _check_point(x, cfg)
    n = x.shape[0]
    pts, weights = _outer_points(x, cfg)
    S = pts.shape[0]
    G = _oracle_gradients(u, pts.reshape(-1, n), cfg).reshape(S, n, n, u.N)
    A = _stress(G, float(p))
    # column-wise divergence: sum_j d_j A[j, :] with the stencil in direction j
    diag = A[:, np.arange(n), np.arange(n), :]
    return -np.einsum("s,sjc->c", weights, diag)


def scaled_residual(residual: np.ndarray, x: Sequence[float], r: float) -> float:
    """``|residual| / (1 + |x|^r)`` where ``r = gamma p - p - gamma - k``."""
    radius = float(np.linalg.norm(np.asarray(x, dtype=float)))
    return float(np.linalg.norm(residual)) / (1.0 + radius ** r)


def relative_residual(residual: np.ndarray, u: PMap, x: Sequence[float], p: float, cfg: FDConfig) -> float:
    """``|residual| / (|A(grad u(x))| / |x|)``; invariant under scaling of x for homogeneous u."""
    x = np.asarray(x, dtype=float)
    G = _oracle_gradients(u, x[None, :], cfg)[0]
    A = _stress(G, float(p))
    scale = float(np.linalg.norm(A)) / float(np.linalg.norm(x))
    return float(np.linalg.norm(residual)) / scale


def fd_inflap_residual(u: PMap, x: Sequence[float], cfg: FDConfig) -> np.ndarray:
    """``1/2 sum_j d_j(|grad u|^2) d_j u`` at ``x``; an N-vector."""
    x = _check_point(x, cfg)
    n = x.shape[0]
    pts, weights = _outer_points(x, cfg)
    S = pts.shape[0]
    G = _oracle_gradients(u, pts.reshape(-1, n), cfg).reshape(S, n, n, u.N)
    sq = np.sum(G * G, axis=(-2, -1))
    d_sq = np.einsum("s,sj->j", weights, sq)
    grad = _oracle_gradients(u, x[None, :], cfg)[0]
    return 0.5 * d_sq @ grad


def gradient_norm_samples(u: PMap, X: np.ndarray, cfg: FDConfig) -> np.ndarray:
    """``|grad u|^2`` at every row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    G = np.concatenate([_oracle_gradients(u, X[i:i + 1], cfg) for i in range(len(X))])
    return np.sum(G * G, axis=(1, 2))


def _slope(steps: Sequence[float], errors: Sequence[float]) -> float:
    errors = np.maximum(np.asarray(errors, dtype=float), np.finfo(float).tiny)
    return float(np.polyfit(np.log(np.asarray(steps)), np.log(errors), 1)[0])


def convergence_order(
    u: PMap,
    x: Sequence[float],
    reference: np.ndarray | None = None,
    steps: Sequence[float] = (1e-2, 5e-3, 2.5e-3, 1.25e-3),
) -> float:
    """Observed order of the plain central-difference gradient at ``x``.

    ``reference`` is the exact gradient when known; otherwise a Richardson
    gradient at a quarter of the finest step stands in for it.
    """
    x = np.asarray(x, dtype=float)
    if reference is None:
        reference = _gradients(u, x[None, :], min(steps) / 4, 1)[0]
    errors = [np.max(np.abs(_central(u, x[None, :], h)[0] - reference)) for h in steps]
    order = _slope(steps, errors)
    logger.debug("gradient errors %s -> order %.3f", errors, order)
    return order


def residual_convergence_order(
    u: PMap,
    x: Sequence[float],
    p: float,
    outer_steps: Sequence[float] = (0.04, 0.02, 0.01, 0.005),
) -> float:
    """Observed order of the second-order divergence as the outer step shrinks.

    For a p-harmonic ``u`` the exact residual is zero, so what remains is the
    discretisation error and its slope should be close to 2.
    """
    x = np.asarray(x, dtype=float)
    radius = float(np.linalg.norm(x))
    errors = []
    for H in outer_steps:
        cfg = FDConfig(outer_step=H, outer_order=2, sample_count=1, r_min=radius / 2, r_max=2 * radius)
        errors.append(float(np.linalg.norm(fd_plap_residual(u, x, p, cfg))))
    return _slope(outer_steps, errors)


@dataclass
class FDPoint:
    x: list[float]
    residual: list[float]
    scaled: float
    relative: float | None = None


@dataclass
class FDReport:
    """Aggregated oracle outcome for one map.

    ``max_residual`` and ``mean_residual`` are taken over the gated norm:
    ``|residual| / (1 + |x|^r)`` for p-Laplace maps and ``|residual|`` for
    infinity maps. ``max_relative`` is the stress-relative diagnostic.
    """

    kind: str  # "plap", "inflap" or "skipped"
    p: str
    tolerance: float
    passed: bool
    max_residual: float = 0.0
    mean_residual: float = 0.0
    per_point: list[FDPoint] = field(default_factory=list)
    residual_exponent: float | None = None
    max_relative: float | None = None
    gradient_norm_mean: float | None = None
    gradient_norm_variance: float | None = None
    gradient_norm_expected: float | None = None
    note: str = ""


def run_oracle(u: PMap, cfg: FDConfig | None = None) -> FDReport:
    """Evaluate the residual of ``u`` at the configured sample points.

    Points are processed in sample order so the report is reproducible for a
    fixed seed. At p = 1 no residual is computed.
    """
    cfg = cfg or FDConfig.from_settings()
    p_label = u.profile.p_label
    if not is_infinite(u.p) and u.p == 1:
        return FDReport("skipped", p_label, 0.0, True, note="p = 1: exponents only, no residual check")

    X = sample_points(u.n, cfg)
    per_point: list[FDPoint] = []
    r = max_relative = None

    if is_infinite(u.p):
        kind, tol = "inflap", cfg.inflap_tol
        for x in X:
            res = fd_inflap_residual(u, x, cfg)
            per_point.append(FDPoint(x.tolist(), res.tolist(), float(np.linalg.norm(res))))
        sq = gradient_norm_samples(u, X, cfg)
        expected = 1.0 + u.profile.K
        mean, var = float(np.mean(sq)), float(np.var(sq, ddof=1)) if len(sq) > 1 else 0.0
        constancy_ok = var < 1e-10 and abs(mean - expected) < 1e-8
    else:
        kind, tol = "plap", cfg.residual_tol
        p = float(u.p)
        r = u.profile.residual_exponent
        for x in X:
            res = fd_plap_residual(u, x, p, cfg)
            per_point.append(FDPoint(x.tolist(), res.tolist(), scaled_residual(res, x, r),
                                     relative_residual(res, u, x, p, cfg)))
        max_relative = max(pt.relative for pt in per_point)
        mean = var = expected = None
        constancy_ok = True

    scaled = np.array([pt.scaled for pt in per_point])
    report = FDReport(
        kind=kind,
        p=p_label,
        tolerance=tol,
        passed=bool(np.max(scaled) < tol) and constancy_ok,
        max_residual=float(np.max(scaled)),
        mean_residual=float(np.mean(scaled)),
        per_point=per_point,
        residual_exponent=r,
        max_relative=max_relative,
        gradient_norm_mean=mean,
        gradient_norm_variance=var,
        gradient_norm_expected=expected,
    )
    if report.passed:
        logger.info("Oracle (%s, p=%s) passed: max residual %.3e", kind, p_label, report.max_residual)
    else:
        logger.error("Oracle (%s, p=%s) failed: max residual %.3e, tol %.1e", kind, p_label,
                     report.max_residual, tol)
    return report
