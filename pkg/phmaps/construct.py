"""Harmonic homogeneous polynomial maps h with |h(x)| = |x|^k.

Every builder returns a :class:`HarmonicCandidate`; :func:`verify` checks
conditions (h1)-(h4) with exact rational arithmetic:

* (h1) every component is harmonic,
* (h2) the squared norm of h is |x|^(2k),
* (h3) |grad h|^2 = (kn + k(2k - 2)) |x|^(2k - 2),
* (h4) x . grad h_j = k h_j for every component.

Radicals live in the components, so all of these are polynomial identities.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from phmaps.errors import (
    ConstructionError,
    DimensionMismatchError,
    DomainError,
    InvariantError,
)
from phmaps.hurwitz import HurwitzFamily, best_t, replay
from phmaps.logger import get_logger
from phmaps.polyalg import (
    Component,
    MultiPoly,
    component_square_sum,
    constant,
    euler_operator,
    is_homogeneous,
    laplacian,
    partial,
    radial_power,
    variable,
)

logger = get_logger(__name__)

# Admissible pairs (n, N) collected from known t_min upper bounds.
REFERENCE_TABLE: dict[int, int] = {
    2: 2, 4: 3, 6: 5, 8: 5, 10: 9, 12: 9, 14: 9, 16: 9,
    18: 17, 20: 17, 22: 27, 24: 27, 26: 29, 28: 33, 30: 33, 32: 33,
    3: 5, 5: 8, 7: 12, 9: 14, 11: 20, 13: 22, 15: 24, 17: 26,
    19: 36, 21: 38, 23: 50, 25: 52, 27: 56, 29: 62, 31: 64,
}

METHODS = ("simple", "even", "hurwitz", "higher", "spherical")


@dataclass(frozen=True)
class HarmonicCandidate:
    """A polynomial map h: R^n -> R^N of degree k, one Component per coordinate."""

    n: int
    N: int
    k: int
    components: tuple
    provenance: str = "user"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.n < 2:
            raise DomainError(f"domain dimension must be at least 2, got {self.n}")
        if self.k < 1:
            raise DomainError(f"degree must be at least 1, got {self.k}")
        if len(self.components) != self.N:
            raise DimensionMismatchError(f"N={self.N} but {len(self.components)} components given")
        for c in self.components:
            if c.nvars != self.n:
                raise DimensionMismatchError(f"component in {c.nvars} variables, expected {self.n}")

    @classmethod
    def from_components(cls, components: Sequence[Component], k: int, provenance: str = "user") -> "HarmonicCandidate":
        components = tuple(components)
        if not components:
            raise DimensionMismatchError("a candidate needs at least one component")
        return cls(components[0].nvars, len(components), k, components, provenance)

    def pad(self, N2: int) -> "HarmonicCandidate":
        """Append ``N2 - N`` zero components."""
        if N2 < self.N:
            raise DomainError(f"cannot pad N={self.N} down to {N2}")
        zeros = tuple(Component(Fraction(0), 1, MultiPoly(self.n)) for _ in range(N2 - self.N))
        return HarmonicCandidate(self.n, N2, self.k, self.components + zeros, f"{self.provenance}+pad({N2})")

    def max_degree(self) -> int:
        return max((c.poly.degree() for c in self.components), default=-1)


@dataclass
class AdmissibilityReport:
    """Outcome of :func:`verify`; witnesses are the nonzero defect polynomials."""

    h1_ok: bool
    h2_ok: bool
    h3_ok: bool
    h4_ok: bool
    homogeneous_ok: bool = True
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.h1_ok and self.h2_ok and self.h3_ok and self.h4_ok

    @property
    def admissible(self) -> bool:
        return self.h1_ok and self.h2_ok

    def failures(self) -> list[str]:
        flags = {"h1": self.h1_ok, "h2": self.h2_ok, "h3": self.h3_ok, "h4": self.h4_ok,
                 "homogeneous": self.homogeneous_ok}
        return [name for name, ok in flags.items() if not ok]


def verify(h: HarmonicCandidate) -> AdmissibilityReport:
    """Check (h1)-(h4) exactly; failures are reported, never raised.

    Raises:
        InvariantError: if (h1) and (h2) hold but (h3) or (h4) does not.
    """
    n, k = h.n, h.k
    witnesses: dict = {}

    homogeneous_ok = all(is_homogeneous(c.poly, k) for c in h.components)

    h1_ok = True
    for j, c in enumerate(h.components):
        lap = laplacian(c.poly)
        if not lap.is_zero():
            h1_ok = False
            witnesses["h1"] = {"component": j, "poly": lap}
            break

    defect2 = component_square_sum(h.components) - radial_power(n, 2 * k)
    h2_ok = defect2.is_zero()
    if not h2_ok:
        witnesses["h2"] = {"component": None, "poly": defect2}

    grad_sq = MultiPoly(n)
    for c in h.components:
        weight = c.scale * c.scale * c.radicand
        for i in range(n):
            d = partial(c.poly, i)
            grad_sq = grad_sq + (d * d) * weight
    defect3 = grad_sq - radial_power(n, 2 * k - 2) * (k * n + k * (2 * k - 2))
    h3_ok = defect3.is_zero()
    if not h3_ok:
        witnesses["h3"] = {"component": None, "poly": defect3}

    h4_ok = True
    for j, c in enumerate(h.components):
        defect4 = euler_operator(c.poly) - c.poly * k
        if not defect4.is_zero():
            h4_ok = False
            witnesses["h4"] = {"component": j, "poly": defect4}
            break

    report = AdmissibilityReport(h1_ok, h2_ok, h3_ok, h4_ok, homogeneous_ok, witnesses)
    if report.admissible and not (h3_ok and h4_ok):
        raise InvariantError(f"(h1) and (h2) hold but (h3)/(h4) fail for {h.provenance}")
    if report.passed:
        logger.debug("verify passed for %s (n=%s, N=%s, k=%s)", h.provenance, n, h.N, k)
    else:
        logger.warning("verify failed for %s: %s", h.provenance, report.failures())
    return report


# ------------------------------------------------------------------ helpers
def _square_norm(n: int, idx: Sequence[int]) -> MultiPoly:
    out = MultiPoly(n)
    for i in idx:
        out = out + variable(n, i) ** 2
    return out


def _split_difference(n: int, m: int) -> MultiPoly:
    """|y|^2 - |z|^2 with y = x[0:m], z = x[m:2m]."""
    return _square_norm(n, range(m)) - _square_norm(n, range(m, 2 * m))


# ----------------------------------------------------------------- builders
def build_simple(n: int) -> HarmonicCandidate:
    """All-pairs family with N = n(n - 1).

    Components are ``(x_i^2 - x_j^2) / sqrt(n - 1)`` and
    ``sqrt(n / (2(n - 1))) * 2 x_i x_j`` for ``i < j``; for ``n = 2`` this is
    exactly ``(x1^2 - x2^2, 2 x1 x2)``.
    """
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    pairs = list(itertools.combinations(range(n), 2))
    diffs = [
        Component.make(variable(n, i) ** 2 - variable(n, j) ** 2, Fraction(1, n - 1), n - 1)
        for i, j in pairs
    ]
    cross = [
        Component.make(variable(n, i) * variable(n, j) * 2, Fraction(1, 2 * (n - 1)), 2 * n * (n - 1))
        for i, j in pairs
    ]
    return HarmonicCandidate(n, n * (n - 1), 2, tuple(diffs + cross), f"simple(n={n})")


def build_even_simple(n: int) -> HarmonicCandidate:
    """``(|y|^2 - |z|^2, 2 y_i z_j)`` for ``x = (y, z)``; N = 1 + n^2/4."""
    if n < 2 or n % 2:
        raise DomainError(f"build_even_simple needs an even n >= 2, got {n}")
    m = n // 2
    comps = [Component.make(_split_difference(n, m))]
    for i in range(m):
        for j in range(m, n):
            comps.append(Component.make(variable(n, i) * variable(n, j) * 2))
    return HarmonicCandidate(n, 1 + m * m, 2, tuple(comps), f"even(n={n})")


def _check_family(F: HurwitzFamily, m: int) -> None:
    if F.r != m or F.s != m:
        raise DimensionMismatchError(f"need an [{m}, {m}, t] family, got {list(F.triple)}")
    if not F.matrix_equations_hold():
        raise ConstructionError(f"family {list(F.triple)} fails the Hurwitz equations")


def build_hurwitz_even(n: int, F: HurwitzFamily) -> HarmonicCandidate:
    """``(|y|^2 - |z|^2, 2 F(y, z))`` with N = 1 + t."""
    if n < 2 or n % 2:
        raise DomainError(f"build_hurwitz_even needs an even n >= 2, got {n}")
    m = n // 2
    _check_family(F, m)
    bilinear = F.components(n, range(m), range(m, n))
    comps = [Component.make(_split_difference(n, m))]
    comps += [Component.make(f * 2) for f in bilinear]
    return HarmonicCandidate(n, 1 + F.t, 2, tuple(comps), f"hurwitz_even(n={n},F={list(F.triple)})")


def build_hurwitz_odd(n: int, F: HurwitzFamily) -> HarmonicCandidate:
    """Odd-dimensional family with N = 1 + t + n, built on ``F`` for m = (n - 1)/2.

    With ``x = (y, z, x_n)`` the components, all divided by 2m, are
    ``sqrt(4m^2 - 1)(|y|^2 - |z|^2)``, ``|(y, z)|^2 - 2m x_n^2``,
    ``2 sqrt(4m^2 - 1) F(y, z)`` and ``2 sqrt(2m^2 + m) x_i x_n``.
    """
    if n < 3 or n % 2 == 0:
        raise DomainError(f"build_hurwitz_odd needs an odd n >= 3, got {n}")
    m = (n - 1) // 2
    _check_family(F, m)
    last = n - 1
    inv = Fraction(1, 2 * m)
    comps = [
        Component.make(_split_difference(n, m), inv, 4 * m * m - 1),
        Component.make(_square_norm(n, range(2 * m)) - variable(n, last) ** 2 * (2 * m), inv, 1),
    ]
    for f in F.components(n, range(m), range(m, 2 * m)):
        comps.append(Component.make(f, 2 * inv, 4 * m * m - 1))
    for i in range(2 * m):
        comps.append(Component.make(variable(n, i) * variable(n, last), 2 * inv, 2 * m * m + m))
    return HarmonicCandidate(n, 1 + F.t + n, 2, tuple(comps), f"hurwitz_odd(n={n},F={list(F.triple)})")


def _multinomial(k: int, alpha: Sequence[int]) -> int:
    out = math.factorial(k)
    for a in alpha:
        out //= math.factorial(a)
    return out


def _complex_mul(a: tuple[MultiPoly, MultiPoly], b: tuple[MultiPoly, MultiPoly]):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def build_higher_order(n: int, k: int) -> HarmonicCandidate:
    """Degree-k family from ``z_j = x_{2j-1} + i x_{2j}``.

    Components are ``sqrt(k! / prod(alpha_j!)) * Re(z^alpha)`` and the matching
    imaginary parts over all multi-indices ``|alpha| = k``, giving
    ``N = 2 binom(n/2 + k - 1, k)``.
    """
    if n < 2 or n % 2:
        raise DomainError(f"build_higher_order needs an even n >= 2, got {n}")
    if k < 2:
        raise DomainError(f"build_higher_order needs k >= 2, got {k}")
    m = n // 2
    zs = [(variable(n, 2 * j), variable(n, 2 * j + 1)) for j in range(m)]
    one = (constant(n, 1), MultiPoly(n))
    comps = []
    alphas = sorted(
        (a for a in itertools.product(range(k + 1), repeat=m) if sum(a) == k), reverse=True
    )
    for alpha in alphas:
        z = one
        for j, a in enumerate(alpha):
            for _ in range(a):
                z = _complex_mul(z, zs[j])
        weight = _multinomial(k, alpha)
        comps.append(Component.make(z[0], 1, weight))
        comps.append(Component.make(z[1], 1, weight))
    N = 2 * math.comb(m + k - 1, k)
    return HarmonicCandidate(n, N, k, tuple(comps), f"higher(n={n},k={k})")


def _legendre_part(l: int, m: int) -> MultiPoly:
    """Polynomial in ``z = x3`` and ``r^2`` multiplying ``(x1 + i x2)^m`` in a degree-l solid harmonic."""
    z = variable(3, 2)
    out = MultiPoly(3)
    for j in range((l - m) // 2 + 1):
        c = Fraction((-1) ** j * math.comb(l, j) * math.comb(2 * l - 2 * j, l), 2 ** l)
        c *= Fraction(math.factorial(l - 2 * j), math.factorial(l - 2 * j - m))
        out = out + radial_power(3, 2 * j) * z ** (l - 2 * j - m) * c
    return out


def build_solid_harmonics(k: int) -> HarmonicCandidate:
    """All ``2k + 1`` real solid harmonics of degree k on R^3, normalised so that
    their squares add up to ``|x|^(2k)``.

    The order-m pair is ``sqrt(2 (k - m)! / (k + m)!) * P_m * (Re, Im)(x1 + i x2)^m``.
    """
    if k < 1:
        raise DomainError(f"build_solid_harmonics needs k >= 1, got {k}")
    comps = [Component.make(_legendre_part(k, 0))]
    w = (variable(3, 0), variable(3, 1))
    z = (constant(3, 1), MultiPoly(3))
    for m in range(1, k + 1):
        z = _complex_mul(z, w)
        P = _legendre_part(k, m)
        weight = Fraction(2 * math.factorial(k - m), math.factorial(k + m))
        # sqrt(a / b) = sqrt(a b) / b
        scale, radicand = Fraction(1, weight.denominator), weight.numerator * weight.denominator
        comps.append(Component.make(P * z[0], scale, radicand))
        comps.append(Component.make(P * z[1], scale, radicand))
    return HarmonicCandidate(3, 2 * k + 1, k, tuple(comps), f"spherical(n=3,k={k})")


# ------------------------------------------------------------- isometries
def rotate(h: HarmonicCandidate, i: int, j: int, a: Fraction, b: Fraction) -> HarmonicCandidate:
    """Mix components ``i`` and ``j`` by the rational rotation ``[[a, b], [-b, a]]``.

    Both components must share a radicand and ``a^2 + b^2`` must equal 1.
    """
    a, b = Fraction(a), Fraction(b)
    if a * a + b * b != 1:
        raise DomainError(f"({a}, {b}) is not a rotation")
    ci, cj = h.components[i], h.components[j]
    if ci.radicand != cj.radicand:
        raise DomainError("rotation needs components with equal radicands")
    pi, pj = ci.poly * ci.scale, cj.poly * cj.scale
    comps = list(h.components)
    comps[i] = Component(Fraction(1), ci.radicand, pi * a + pj * b)
    comps[j] = Component(Fraction(1), ci.radicand, pi * (-b) + pj * a)
    return HarmonicCandidate(h.n, h.N, h.k, tuple(comps), f"{h.provenance}+rot({i},{j})")


def reflect_variable(h: HarmonicCandidate, i: int) -> HarmonicCandidate:
    """Compose h with the reflection ``x_i -> -x_i`` of the domain."""
    if not 0 <= i < h.n:
        raise DomainError(f"variable index {i} out of range for n={h.n}")
    comps = []
    for c in h.components:
        terms = {e: (-v if e[i] % 2 else v) for e, v in c.poly.terms.items()}
        comps.append(c.with_poly(MultiPoly(h.n, terms)))
    return HarmonicCandidate(h.n, h.N, h.k, tuple(comps), f"{h.provenance}+refl({i})")


def canonical_components(h: HarmonicCandidate) -> tuple:
    """Components modulo order and sign, as ``(radicand, poly)`` pairs."""
    out = []
    for c in h.components:
        if c.is_zero():
            continue
        poly = c.poly * c.scale
        lead = poly.sorted_terms()[0][1]
        if lead < 0:
            poly = -poly
        out.append((c.radicand, tuple(poly.sorted_terms())))
    return tuple(sorted(out))


def same_up_to_signs(a: HarmonicCandidate, b: HarmonicCandidate) -> bool:
    """True when a and b differ only by a permutation and signs of components."""
    return (a.n, a.k) == (b.n, b.k) and canonical_components(a) == canonical_components(b)


# ------------------------------------------------------------------ table
@dataclass(frozen=True)
class TableRow:
    n: int
    N_constructed: int
    N_reference: int | None
    method: str
    plan: str = ""

    @property
    def gap(self) -> int | None:
        return None if self.N_reference is None else self.N_constructed - self.N_reference


def build(n: int, method: str, k: int = 2, budget: int = 6) -> HarmonicCandidate:
    """Dispatch to a builder by method name; ``hurwitz`` picks the even or odd variant."""
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    if method not in ("higher", "spherical") and k != 2:
        raise DomainError(f"method {method!r} builds degree 2 maps only")
    if method == "simple":
        return build_simple(n)
    if method == "even":
        return build_even_simple(n)
    if method == "higher":
        return build_higher_order(n, k)
    if method == "spherical":
        if n != 3:
            raise DomainError(f"method 'spherical' builds maps on R^3 only, got n={n}")
        return build_solid_harmonics(k)
    if n % 2 == 0:
        _, plan = best_t(n // 2, n // 2, budget)
        return build_hurwitz_even(n, replay(plan))
    if n < 3:
        raise DomainError(f"no Hurwitz construction for n={n}")
    _, plan = best_t((n - 1) // 2, (n - 1) // 2, budget)
    return build_hurwitz_odd(n, replay(plan))


def n_table(max_n: int, budget: int = 6) -> list[TableRow]:
    """Best verified N per n in 2..max_n with the reference value and gap.

    Raises:
        ConstructionError: if a winning construction fails verification.
    """
    if max_n < 2:
        raise DomainError(f"max_n must be at least 2, got {max_n}")
    rows = []
    for n in range(2, max_n + 1):
        options: list[tuple[int, int, str, str]] = [(n * (n - 1), 2, "simple", "")]
        if n % 2 == 0:
            m = n // 2
            t, plan = best_t(m, m, budget)
            options.append((1 + t, 0, "hurwitz", plan.key))
            options.append((1 + m * m, 1, "even", ""))
        else:
            m = (n - 1) // 2
            t, plan = best_t(m, m, budget)
            options.append((1 + t + n, 0, "hurwitz", plan.key))
        N, _, method, plan_key = min(options)
        h = build(n, method, budget=budget)
        if h.N != N or not verify(h).passed:
            raise ConstructionError(f"table entry n={n} via {method} failed verification")
        row = TableRow(n, N, REFERENCE_TABLE.get(n), method, plan_key)
        if row.gap:
            logger.info("Table gap at n=%s: constructed %s, reference %s", n, N, row.N_reference)
        rows.append(row)
    return rows


def table_csv(rows: Sequence[TableRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["n", "N_constructed", "N_paper", "gap", "provenance"])
    for row in rows:
        writer.writerow([
            row.n,
            row.N_constructed,
            "" if row.N_reference is None else row.N_reference,
            "" if row.gap is None else row.gap,
            row.method if not row.plan else f"{row.method}:{row.plan}",
        ])
    return buf.getvalue()
