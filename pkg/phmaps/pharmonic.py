"""Exponent profiles and the maps u(x) = |x|^(gamma - k) h(x).

For an admissible h of degree k on R^n, u is p-harmonic when gamma is the
larger root of

    gamma^2 (p - 1) + gamma (n - p) - k(k + n - 2) = 0,

with gamma = k(k + n - 2)/(n - 1) at p = 1 and gamma = 1 at p = inf, where
u solves the infinity-Laplace system instead. The derived exponents are
theta = 1/p, tau = (gamma - 1)(1 - theta), a = (gamma - 1)(p - 1) for the
stress A(grad u) and nu = (gamma - 1) p / 2 for V(grad u).

Note: the squared gradient norm of an infinity map is constant and equals
1 + k(k + n - 2); some statements of this fact omit the square.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
import sympy

from phmaps.construct import HarmonicCandidate, verify
from phmaps.errors import AdmissibilityError, DomainError
from phmaps.logger import get_logger
from phmaps.polyalg import monomials, partial, rational_sqrt, stack_components

logger = get_logger(__name__)

Exponent = Union[Fraction, float]
INF = math.inf


def as_exponent(p) -> Exponent:
    """Normalise p to a Fraction, or ``math.inf``.

    Floats are read through their shortest decimal representation, so
    ``1.5`` becomes ``3/2``.
    """
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, float):
        if math.isinf(p) and p > 0:
            return INF
        if math.isnan(p) or math.isinf(p):
            raise DomainError(f"invalid exponent p={p}")
        return Fraction(repr(p))
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        return Fraction(p.strip())
    raise DomainError(f"cannot interpret p={p!r}")


def is_infinite(p) -> bool:
    return isinstance(p, float) and math.isinf(p)


def _f(x) -> float:
    return float(x)


@dataclass(frozen=True)
class ExponentProfile:
    """All exponents of u for one (n, k, p); exact values are kept when rational."""

    n: int
    k: int
    p: Exponent
    theta: float
    gamma: float
    tau: float
    a: float
    nu: float
    gamma_exact: Fraction | None = None
    other_root: float | None = None

    @property
    def K(self) -> int:
        return self.k * (self.k + self.n - 2)

    @property
    def p_label(self) -> str:
        return "inf" if is_infinite(self.p) else str(self.p)

    @property
    def smooth(self) -> bool:
        """True when gamma - k is a non-negative even integer (u is then C^inf)."""
        if self.gamma_exact is None:
            return False
        d = self.gamma_exact - self.k
        return d.denominator == 1 and d >= 0 and d.numerator % 2 == 0

    @property
    def residual_exponent(self) -> float:
        """r = gamma p - p - gamma - k; the pointwise residual scales like |x|^(r + k)."""
        if is_infinite(self.p):
            raise DomainError("the residual exponent needs a finite p")
        p = float(self.p)
        return self.gamma * p - p - self.gamma - self.k

    def quadratic_tolerance(self, rel: float = 1e-12) -> float:
        """Bound for |quadratic_residual()| that scales with the size of the coefficients.

        A float gamma carries about one ulp of error, which the quadratic
        multiplies by roughly 2 gamma (p - 1).
        """
        p = float(self.p)
        return rel * max(1.0, p, float(self.K)) * max(1.0, self.gamma ** 2)

    def quadratic_residual(self, gamma: float | None = None) -> float:
        """gamma^2 (p - 1) + gamma (n - p) - K, evaluated exactly at the float gamma."""
        if is_infinite(self.p):
            raise DomainError("the quadratic has no finite form at p = inf")
        g = Fraction(self.gamma if gamma is None else gamma)
        if gamma is None and self.gamma_exact is not None:
            g = self.gamma_exact
        p = Fraction(self.p)
        return _f(g * g * (p - 1) + g * (self.n - p) - self.K)

    def tau_residual(self) -> float:
        """tau^2 + tau (1 + theta (n - 2)) + theta (1 - theta)(n - 1 - K)."""
        t, th = Fraction(self.tau), Fraction(self.theta)
        return _f(t * t + t * (1 + th * (self.n - 2)) + th * (1 - th) * (self.n - 1 - self.K))


def _stable_root(a: float, b: float, K: float) -> float:
    """Larger root of a g^2 + b g - K = 0 for a > 0, K >= 0, without cancellation."""
    disc = math.sqrt(b * b + 4 * a * K)
    if b > 0:
        return 2 * K / (b + disc)
    return (-b + disc) / (2 * a)


def gamma(n: int, k: int, p) -> ExponentProfile:
    """Exponent profile for degree ``k`` maps on ``R^n`` at exponent ``p`` in [1, inf].

    Raises:
        DomainError: if ``p < 1``, ``n < 2`` or ``k < 1``.
    """
    if n < 2 or k < 1:
        raise DomainError(f"need n >= 2 and k >= 1, got n={n}, k={k}")
    p = as_exponent(p)
    K = k * (k + n - 2)

    if is_infinite(p):
        a = Fraction(K - n + 1)
        return ExponentProfile(n, k, p, 0.0, 1.0, 0.0, _f(a), _f(a / 2), gamma_exact=Fraction(1))
    if p < 1:
        raise DomainError(f"p must lie in [1, inf], got {p}")

    theta = 1 / p
    other = None
    if p == 1:
        g_exact = Fraction(K, n - 1)
    elif k == 1:
        g_exact = Fraction(1)
        other = _f(Fraction(-(n - 1)) / (p - 1))
    else:
        qa, qb = p - 1, n - p
        root = rational_sqrt(qb * qb + 4 * qa * K)
        g_exact = None if root is None else (-qb + root) / (2 * qa)

    if g_exact is not None:
        g = _f(g_exact)
        tau_e = (g_exact - 1) * (1 - theta)
        profile = ExponentProfile(
            n, k, p, _f(theta), g, _f(tau_e), _f((g_exact - 1) * (p - 1)), _f((g_exact - 1) * p / 2),
            gamma_exact=g_exact,
            other_root=other if other is not None or p == 1 else _f(Fraction(-K) / ((p - 1) * g_exact)),
        )
        return profile

    qa, qb = _f(p - 1), _f(n - p)
    g = _stable_root(qa, qb, float(K))
    # one Newton step in exact arithmetic on the float iterate
    gf, pf = Fraction(g), Fraction(p)
    f = gf * gf * (pf - 1) + gf * (n - pf) - K
    df = 2 * gf * (pf - 1) + (n - pf)
    g = _f(gf - f / df)
    th = _f(theta)
    return ExponentProfile(
        n, k, p, th, g, (g - 1) * (1 - th), (g - 1) * _f(p - 1), (g - 1) * _f(p) / 2,
        gamma_exact=None, other_root=-K / (qa * g),
    )


# ------------------------------------------------------------ symbolic checks
@dataclass(frozen=True)
class ResidualBreakdown:
    """Terms of the pointwise p-Laplacian divided by the common factor.

    Values are Fractions when gamma and p are rational, floats otherwise.
    """

    I: Fraction | float
    II: Fraction | float
    III: Fraction | float
    total: Fraction | float
    quadratic: Fraction | float
    identity_holds: bool

    @property
    def exact(self) -> bool:
        return isinstance(self.total, Fraction)


@functools.lru_cache(maxsize=None)
def proof_identity_holds() -> bool:
    """(g - k)(r + n + k) + k(r + 2) equals the gamma quadratic as a polynomial.

    Here r = g p - p - g - k and all of g, p, n, k are symbols.
    """
    g, p, n, k = sympy.symbols("gamma p n k")
    r = g * p - p - g - k
    lhs = (g - k) * r + (g - k) * (n + k) + k * (r + 2)
    rhs = g**2 * (p - 1) + g * (n - p) - k * (n + k - 2)
    return sympy.expand(lhs - rhs) == 0


@functools.lru_cache(maxsize=None)
def tau_identity_holds() -> bool:
    """Substituting gamma = 1 + tau/(1 - theta), p = 1/theta turns the gamma
    quadratic (times theta (1 - theta)) into the tau quadratic."""
    tau, th, n, K = sympy.symbols("tau theta n K")
    g = 1 + tau / (1 - th)
    p = 1 / th
    quad = g**2 * (p - 1) + g * (n - p) - K
    tau_quad = tau**2 + tau * (1 + th * (n - 2)) + th * (1 - th) * (n - 1 - K)
    return sympy.cancel(sympy.together(quad * th * (1 - th) - tau_quad)) == 0


def residual_terms(n: int, k: int, p, g) -> ResidualBreakdown:
    """Evaluate I, II, III at a given gamma (exact when all inputs are rational)."""
    p = as_exponent(p)
    if is_infinite(p) or p <= 1:
        raise DomainError(f"the pointwise residual needs p in (1, inf), got {p}")
    exact = isinstance(g, (int, Fraction))
    g = Fraction(g) if exact else float(g)
    pp = p if exact else float(p)
    r = g * pp - pp - g - k
    I = (g - k) * r
    II = (g - k) * (n + k)
    III = k * (r + 2)
    quad = g * g * (pp - 1) + g * (n - pp) - k * (n + k - 2)
    if not exact:
        I, II, III, quad = _f(I), _f(II), _f(III), _f(quad)
    return ResidualBreakdown(I, II, III, I + II + III, quad, proof_identity_holds())


# --------------------------------------------------------------------- maps
@dataclass(frozen=True)
class PMap:
    """u(x) = |x|^(gamma - k) h(x) for an admissible candidate h."""

    candidate: HarmonicCandidate
    profile: ExponentProfile

    @property
    def p(self) -> Exponent:
        return self.profile.p

    @property
    def n(self) -> int:
        return self.candidate.n

    @property
    def N(self) -> int:
        return self.candidate.N

    @functools.cached_property
    def _value_table(self):
        return stack_components(self.candidate.components)

    @functools.cached_property
    def _gradient_tables(self):
        return [
            stack_components([c.with_poly(partial(c.poly, i)) for c in self.candidate.components])
            for i in range(self.n)
        ]

    def h_many(self, X: np.ndarray) -> np.ndarray:
        E, C = self._value_table
        return monomials(X, E) @ C

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """u at every row of ``X``; returns an ``M x N`` array."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        radius = np.linalg.norm(X, axis=1)
        return self.h_many(X) * (radius ** (self.profile.gamma - self.candidate.k))[:, None]

    def evaluate(self, x: Sequence[float]) -> np.ndarray:
        return self.evaluate_many(np.asarray(x, dtype=float)[None, :])[0]

    def with_gamma(self, g: float) -> "PMap":
        """Same h with a replaced exponent; used as a negative control."""
        return PMap(self.candidate, replace(self.profile, gamma=float(g), gamma_exact=None))


def assemble(h: HarmonicCandidate, p) -> PMap:
    """Pair an admissible candidate with its exponent profile.

    Raises:
        AdmissibilityError: if h fails (h1) or (h2).
    """
    report = verify(h)
    if not report.admissible:
        raise AdmissibilityError(
            f"candidate {h.provenance} is not admissible: {report.failures()}", report=report
        )
    profile = gamma(h.n, h.k, p)
    logger.info("Assembled %s with p=%s, gamma=%.17g", h.provenance, profile.p_label, profile.gamma)
    return PMap(h, profile)


def infinity_map(h: HarmonicCandidate) -> PMap:
    """u(x) = |x|^(1 - k) h(x), which solves the infinity-Laplace system."""
    return assemble(h, INF)


def symbolic_residual(u: PMap) -> ResidualBreakdown:
    """Proof terms of the pointwise p-Laplacian at the map's own gamma."""
    g = u.profile.gamma_exact if u.profile.gamma_exact is not None else u.profile.gamma
    return residual_terms(u.n, u.candidate.k, u.p, g)


def analytic_gradient(u: PMap, x: Sequence[float]) -> np.ndarray:
    """``n x N`` matrix (grad u)_ij = d_i u_j from exact partials of h."""
    x = np.asarray(x, dtype=float)
    radius = float(np.linalg.norm(x))
    if radius == 0.0:
        raise DomainError("the gradient is evaluated away from the origin only")
    E, C = u._value_table
    grads = u._gradient_tables
    g, k = u.profile.gamma, u.candidate.k
    h = (monomials(x, E) @ C)[0]
    dh = np.array([(monomials(x, Ei) @ Ci)[0] for Ei, Ci in grads])
    return (g - k) * radius ** (g - k - 2) * np.outer(x, h) + radius ** (g - k) * dh


def gradient_norm_identity(u: PMap, x: Sequence[float]) -> tuple[float, float]:
    """Return ``(|grad u(x)|^2, |x|^(2(gamma - 1)) (gamma^2 + K))``."""
    x = np.asarray(x, dtype=float)
    radius = float(np.linalg.norm(x))
    if radius == 0.0:
        raise DomainError("x must be nonzero")
    lhs = float(np.sum(analytic_gradient(u, x) ** 2))
    g = u.profile.gamma
    rhs = radius ** (2 * (g - 1)) * (g * g + u.profile.K)
    return lhs, rhs
