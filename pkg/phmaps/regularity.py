"""Regularity exponents as functions of theta = 1/p, and the figure data built from them.

Two families are compared:

* the planar scalar optimum, alpha(p) = (1 + q + sqrt(1 + 14q + q^2))/6 with
  q = 1/(p - 1), equivalently tau = (1 + sqrt(1 + 12 theta - 12 theta^2))/6;
* the degree 2 maps on R^n, whose tau is the larger root of
  tau^2 + tau(1 + theta(n - 2)) + theta(1 - theta)(n - 1 - K) = 0 with K = 2n.

Regularity is read off homogeneity: tau/(1 - theta) for grad u,
tau/theta for A(grad u) and tau/(2 theta (1 - theta)) for V(grad u). A
homogeneous map with gamma - k a non-negative even integer is C^inf
regardless of these numbers.
"""
from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import sympy

from phmaps.errors import DomainError, InvariantError
from phmaps.logger import get_logger
from phmaps.pharmonic import as_exponent, gamma, is_infinite
from phmaps.polyalg import rational_sqrt

logger = get_logger(__name__)

FIGURES: dict[str, tuple[str, ...]] = {
    "thetaalpha": ("alpha", "tau"),
    "conjectures": ("grad_u", "A", "V", "reference"),
    "R2R2": ("scalar_optimal", "v_boundary", "example_n2", "example_n3", "example_n4"),
    "n_to_infty": tuple(f"example_n{n}" for n in (2, 8, 32, 128, 512, 2048)) + ("limit",),
}
CSV_HEADER = ("theta", "series", "quantity", "n", "value")
SURROGATE_N = 10**6


# ------------------------------------------------------------ scalar optimum
def alpha_scalar_2d(p, exact: bool = False):
    """Optimal Hoelder exponent of the gradient of planar scalar p-harmonic functions.

    With ``exact=True`` and a rational ``p`` whose radicand is a rational
    square, the result is a :class:`Fraction`.

    Raises:
        DomainError: if ``p <= 1``.
    """
    p = as_exponent(p)
    if is_infinite(p):
        return Fraction(1, 3) if exact else 1 / 3
    if p <= 1:
        raise DomainError(f"alpha is defined for p > 1, got {p}")
    q = 1 / (p - 1)
    radicand = 1 + 14 * q + q * q
    if exact:
        root = rational_sqrt(radicand)
        if root is not None:
            return (1 + q + root) / 6
    qf = float(q)
    return (1 + qf + math.sqrt(1 + 14 * qf + qf * qf)) / 6


def tau_scalar(theta):
    """tau = alpha (1 - theta) of the scalar optimum; vectorised over ``theta``."""
    theta = np.asarray(theta, dtype=float)
    return (1 + np.sqrt(1 + 12 * theta - 12 * theta * theta)) / 6


# ------------------------------------------------------------ map examples
def tau_example(n: int, theta, k: int = 2):
    """Larger root of the tau quadratic for degree ``k`` maps on ``R^n``; vectorised.

    Uses ``-2C/(B + sqrt(B^2 - 4C))``, which stays accurate for large ``n``.
    """
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    theta = np.asarray(theta, dtype=float)
    K = k * (k + n - 2)
    B = 1 + theta * (n - 2)
    C = theta * (1 - theta) * (n - 1 - K)
    return -2 * C / (B + np.sqrt(B * B - 4 * C))


def tau_quadratic(n: int, theta, tau, k: int = 2):
    K = k * (k + n - 2)
    theta = np.asarray(theta, dtype=float)
    tau = np.asarray(tau, dtype=float)
    return tau * tau + tau * (1 + theta * (n - 2)) + theta * (1 - theta) * (n - 1 - K)


def _safe_div(a, b):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(b == 0, np.inf, a / np.where(b == 0, 1, b))


@dataclass(frozen=True)
class CurvePoint:
    theta: float
    series: str
    quantity: str
    value: float
    n: int | None = None
    k: int = 2


def theta_grid(points: int) -> np.ndarray:
    """``points`` equally spaced values ``i/(points - 1)`` covering [0, 1]."""
    if points < 2:
        raise DomainError(f"a curve grid needs at least 2 points, got {points}")
    return np.arange(points) / (points - 1)


def _series(name: str, theta: np.ndarray) -> tuple[str, int | None, np.ndarray]:
    """(quantity, n, values) for one series name."""
    if name.startswith("example_n"):
        n = int(name[len("example_n"):])
        return "tau", n, tau_example(n, theta)
    tau = tau_scalar(theta)
    if name == "tau" or name == "scalar_optimal":
        return "tau", None, tau
    if name in ("alpha", "grad_u"):
        return ("alpha" if name == "alpha" else "regularity"), None, _safe_div(tau, 1 - theta)
    if name == "A":
        return "regularity", None, _safe_div(tau, theta)
    if name == "V":
        return "regularity", None, _safe_div(tau, 2 * theta * (1 - theta))
    if name == "reference":
        return "regularity", None, np.ones_like(theta)
    if name == "v_boundary":
        return "tau", None, 2 * theta * (1 - theta)
    if name == "limit":
        return "tau", None, 1 - theta
    raise DomainError(f"unknown series {name!r}")


def curve_points(figure: str, points: int) -> list[CurvePoint]:
    """Curve samples of ``figure`` ordered by theta, then by series."""
    if figure not in FIGURES:
        raise DomainError(f"unknown figure {figure!r}; expected one of {sorted(FIGURES)}")
    theta = theta_grid(points)
    columns = [(name, *_series(name, theta)) for name in FIGURES[figure]]
    rows = []
    for i, th in enumerate(theta):
        for name, quantity, n, values in columns:
            rows.append(CurvePoint(float(th), name, quantity, float(values[i]), n))
    return rows


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def emit_curves(figure: str, points: int) -> str:
    """CSV text (RFC 4180, CRLF line ends) with one row per (theta, series)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for pt in curve_points(figure, points):
        writer.writerow((_fmt(pt.theta), pt.series, pt.quantity, "" if pt.n is None else pt.n, _fmt(pt.value)))
    logger.info("Emitted figure %s on %s theta points", figure, points)
    return buf.getvalue()


# ------------------------------------------------------------ observations
@dataclass
class ObservationCheck:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


def _interior_grid(points: int) -> list[Fraction]:
    return [Fraction(i, points + 1) for i in range(1, points + 1)]


def _strictly_monotone(values: Sequence[float], increasing: bool, margin: float = 1e-10) -> bool:
    d = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(d > margin)) if increasing else bool(np.all(d < -margin))


@functools.lru_cache(maxsize=None)
def _derivative_forms():
    """Closed-form derivatives of gamma (in p and n) and of a (in theta) for k = 2.

    Each implicit derivative is compared with its stated closed form before
    being compiled to a numpy function.
    """
    g, p, n, a, th = sympy.symbols("gamma p n a theta")
    Q = g**2 * (p - 1) + g * (n - p) - 2 * n
    dg_dp = -sympy.diff(Q, p) / sympy.diff(Q, g)
    dg_dn = -sympy.diff(Q, n) / sympy.diff(Q, g)
    if sympy.simplify(dg_dp + (g**2 - g) / (2 * g * (p - 1) + n - p)) != 0:
        raise InvariantError("implicit derivative d gamma/dp does not match its closed form")
    R = a**2 * th + a * (1 + th * (n - 2)) - (1 - th) * (n + 1)
    substituted = R.subs({a: (g - 1) * (p - 1), th: 1 / p}) * p / (p - 1)
    if sympy.cancel(sympy.together(substituted - Q)) != 0:
        raise InvariantError("the a-quadratic is not the gamma quadratic in disguise")
    da_dth = -sympy.diff(R, th) / sympy.diff(R, a)
    return (
        sympy.lambdify((g, p, n), dg_dp, "numpy"),
        sympy.lambdify((g, p, n), dg_dn, "numpy"),
        sympy.lambdify((a, th, n), da_dth, "numpy"),
    )


def nu_cubic(theta) -> Fraction:
    """2 theta^3 - 5 theta^2 + 4 theta - 1, exact for rational theta."""
    theta = Fraction(theta)
    return 2 * theta**3 - 5 * theta**2 + 4 * theta - 1


def check_B(n_range: Iterable[int] = range(2, 13), points: int = 1000) -> dict[str, ObservationCheck]:
    """Check observations (B1)-(B5) for k = 2 on an interior theta grid.

    (B1) gamma decreases in p from 2n/(n-1) to 1; (B2) a increases in p from
    0 to n + 1; (B3) gamma > 2 for p < 2 with gamma(2) = 2 and gamma - 2
    shrinking as n grows; (B4) a >= 1 for p >= 2 with a(2) = 1; (B5) nu < 1
    for n >= 3 and p in (1, 2).
    """
    n_values = sorted(set(n_range))
    if not n_values or n_values[0] < 2:
        raise DomainError("check_B needs dimensions n >= 2")
    thetas = _interior_grid(points)
    dg_dp, dg_dn, da_dth = _derivative_forms()
    out: dict[str, ObservationCheck] = {}

    b1 = b2 = b3 = b4 = b5 = True
    d1: dict = {}
    d2: dict = {}
    d3: dict = {}
    d4: dict = {}
    d5: dict = {"n2_min_nu": None}
    for n in n_values:
        profiles = [gamma(n, 2, 1 / th) for th in thetas]
        g = np.array([pr.gamma for pr in profiles])
        a = np.array([pr.a for pr in profiles])
        nu = np.array([pr.nu for pr in profiles])
        th = np.array([float(t) for t in thetas])
        p = 1 / th

        # theta ascending means p descending
        limits1 = gamma(n, 2, 1).gamma_exact == Fraction(2 * n, n - 1) and gamma(n, 2, math.inf).gamma == 1
        signs1 = bool(np.all(dg_dp(g, p, n) < 0))
        ok1 = _strictly_monotone(g, increasing=True) and signs1 and limits1
        b1 &= ok1
        d1[n] = {"monotone": ok1, "derivative_sign": signs1, "limits": limits1}

        limits2 = gamma(n, 2, 1).a == 0 and gamma(n, 2, math.inf).a == n + 1
        signs2 = bool(np.all(da_dth(a, th, n) < 0))
        ok2 = _strictly_monotone(a, increasing=False) and signs2 and limits2
        b2 &= ok2
        d2[n] = {"monotone": ok2, "derivative_sign": signs2, "limits": limits2}

        below2 = th > 0.5
        at2 = gamma(n, 2, 2).gamma_exact == 2
        ok3 = bool(np.all(g[below2] > 2)) and at2
        b3 &= ok3
        d3[n] = {"gamma_gt_2": ok3, "max_gap": float(np.max(g[below2] - 2)) if below2.any() else None}

        above2 = th <= 0.5
        a2 = gamma(n, 2, 2).a == 1
        ok4 = bool(np.all(a[above2] >= 1 - 1e-12)) and a2
        b4 &= ok4
        d4[n] = {"a_ge_1": ok4, "a_at_2": a2}

        if n >= 3:
            ok5 = bool(np.all(nu[below2] < 1)) and bool(np.all(dg_dn(g[below2], p[below2], n) < 0))
            b5 &= ok5
            d5[n] = {"nu_lt_1": ok5, "max_nu": float(np.max(nu[below2])) if below2.any() else None}
        elif below2.any():
            # informational: the planar curve stays on the other side of nu = 1
            d5["n2_min_nu"] = float(np.min(nu[below2]))
            d5["n2_nu_ge_1"] = bool(np.min(nu[below2]) >= 1 - 1e-12)

    # (B3) surrogate: gamma - 2 -> 0 as n grows at fixed p < 2
    surrogate = []
    for t in (Fraction(2, 3), Fraction(3, 4), Fraction(9, 10)):
        gaps = [gamma(n, 2, 1 / t).gamma - 2 for n in (*n_values, SURROGATE_N)]
        surrogate.append({"theta": float(t), "gaps": gaps})
        b3 &= _strictly_monotone(gaps, increasing=False, margin=0.0) and gaps[-1] < 1e-5
    d3["surrogate"] = surrogate

    # (B5) certificate at n = 3: exact cubic sign on rational grid points
    cubic_ok = all(nu_cubic(t) >= 0 for t in thetas if Fraction(1, 2) < t < 1)
    b5 &= cubic_ok
    d5["cubic_nonnegative"] = cubic_ok

    out["B1"] = ObservationCheck("B1", b1, d1)
    out["B2"] = ObservationCheck("B2", b2, d2)
    out["B3"] = ObservationCheck("B3", b3, d3)
    out["B4"] = ObservationCheck("B4", b4, d4)
    out["B5"] = ObservationCheck("B5", b5, d5)
    failed = [name for name, chk in out.items() if not chk.passed]
    if failed:
        logger.error("Observations failed: %s", failed)
    else:
        logger.info("Observations B1-B5 hold for n in %s on %s grid points", n_values, points)
    return out


def check_A(points: int = 1000) -> dict[str, ObservationCheck]:
    """Check (A1)-(A5) for the planar scalar optimum on an interior theta grid.

    (A1) grad u loses regularity as p grows, towards 1/3; (A2) A(grad u)
    gains regularity in p, starting from 1/3; (A3) grad u is at least C^1 for
    p <= 2; (A4) A(grad u) is at least C^1 for p >= 2; (A5) V(grad u) is at
    least C^1 for every p.
    """
    th = np.array([float(t) for t in _interior_grid(points)])
    tau = tau_scalar(th)
    grad_u = tau / (1 - th)
    stress = tau / th
    v = tau / (2 * th * (1 - th))
    tol = 1e-12
    out = {
        "A1": ObservationCheck("A1", _strictly_monotone(grad_u, increasing=True, margin=0.0)
                               and abs(alpha_scalar_2d(1e9) - 1 / 3) < 1e-6),
        "A2": ObservationCheck("A2", _strictly_monotone(stress, increasing=False, margin=0.0)
                               and abs(float(tau_scalar(1.0)) - 1 / 3) < tol),
        "A3": ObservationCheck("A3", bool(np.all(grad_u[th >= 0.5] >= 1 - tol))),
        "A4": ObservationCheck("A4", bool(np.all(stress[th <= 0.5] >= 1 - tol))),
        "A5": ObservationCheck("A5", bool(np.all(v >= 1 - tol)), {"min_V": float(np.min(v))}),
    }
    logger.info("Scalar observations: %s", {k: c.passed for k, c in out.items()})
    return out
