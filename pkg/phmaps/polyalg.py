"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial in ``nvars`` variables is stored as a mapping from exponent
tuples to nonzero ``Fraction`` coefficients::

    x1^2 * x2 - 3   ->   {(2, 1): Fraction(1), (0, 0): Fraction(-3)}

The zero polynomial has an empty term map. Every operation returns a fresh,
canonical (zero-free) value; ``MultiPoly`` instances are immutable and safe to
share between threads.

Variable indices in this module are 0-based: ``partial(p, 0)`` is the
derivative in the first coordinate.

A ``Component`` is one coordinate of a map h, stored as
``scale * sqrt(radicand) * poly`` with a square-free integer radicand, so that
its square is an exact rational polynomial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Tuple, Union

import numpy as np
import sympy

from phmaps.errors import DimensionMismatchError, DomainError

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"exact coefficient expected, got {type(value).__name__}")


def _graded_lex_key(exp: Exponent):
    return (sum(exp), exp)


class MultiPoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], Scalar] | None = None):
        if int(nvars) < 1:
            raise DomainError(f"nvars must be positive, got {nvars}")
        self.nvars = int(nvars)
        clean: dict[Exponent, Fraction] = {}
        for exp, coeff in (terms or {}).items():
            key = tuple(int(e) for e in exp)
            if len(key) != self.nvars:
                raise DimensionMismatchError(
                    f"exponent {key} has length {len(key)}, expected {self.nvars}"
                )
            if any(e < 0 for e in key):
                raise DomainError(f"negative exponent in {key}")
            c = _as_fraction(coeff)
            if c != 0:
                clean[key] = clean.get(key, Fraction(0)) + c
        self._terms = {e: c for e, c in clean.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "MultiPoly":
        # trusted constructor for internally produced, already valid terms
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = {e: c for e, c in terms.items() if c != 0}
        obj._hash = None
        return obj

    # ------------------------------------------------------------------ views
    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in graded-lexicographic order, highest degree first."""
        return sorted(self._terms.items(), key=lambda item: _graded_lex_key(item[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # ------------------------------------------------------------- arithmetic
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DimensionMismatchError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        return constant(self.nvars, _as_fraction(other))

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = _as_fraction(other)
            return MultiPoly._raw(self.nvars, {e: v * c for e, v in self._terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return MultiPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if not isinstance(k, int) or k < 0:
            raise DomainError(f"non-negative integer power expected, got {k!r}")
        result = constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exp, coeff in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exp) if e
            )
            if not mono:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(mono)
            elif coeff == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# ----------------------------------------------------------------- builders
def constant(nvars: int, value: Scalar) -> MultiPoly:
    return MultiPoly(nvars, {(0,) * nvars: value})


def variable(nvars: int, i: int) -> MultiPoly:
    """The coordinate polynomial x_{i+1} (0-based index ``i``)."""
    if not 0 <= i < nvars:
        raise DomainError(f"variable index {i} out of range for nvars={nvars}")
    exp = [0] * nvars
    exp[i] = 1
    return MultiPoly(nvars, {tuple(exp): 1})


def add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.nvars != b.nvars:
        raise DimensionMismatchError(f"nvars mismatch: {a.nvars} vs {b.nvars}")
    return a + b


def mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.nvars != b.nvars:
        raise DimensionMismatchError(f"nvars mismatch: {a.nvars} vs {b.nvars}")
    return a * b


def partial(p: MultiPoly, i: int) -> MultiPoly:
    """Formal derivative of ``p`` in the variable with 0-based index ``i``."""
    if not 0 <= i < p.nvars:
        raise DomainError(f"variable index {i} out of range for nvars={p.nvars}")
    out: dict[Exponent, Fraction] = {}
    for exp, coeff in p.terms.items():
        if exp[i] == 0:
            continue
        e = list(exp)
        e[i] -= 1
        out[tuple(e)] = coeff * exp[i]
    return MultiPoly._raw(p.nvars, out)


def gradient(p: MultiPoly) -> list[MultiPoly]:
    return [partial(p, i) for i in range(p.nvars)]


def laplacian(p: MultiPoly) -> MultiPoly:
    out: dict[Exponent, Fraction] = {}
    for exp, coeff in p.terms.items():
        for i, e_i in enumerate(exp):
            if e_i < 2:
                continue
            e = list(exp)
            e[i] -= 2
            key = tuple(e)
            out[key] = out.get(key, Fraction(0)) + coeff * e_i * (e_i - 1)
    return MultiPoly._raw(p.nvars, out)


def euler_operator(p: MultiPoly) -> MultiPoly:
    """Sum of x_i * d_i p; equals deg * p for homogeneous p."""
    return MultiPoly._raw(p.nvars, {e: c * sum(e) for e, c in p.terms.items()})


def radial_power(nvars: int, m: int) -> MultiPoly:
    """The polynomial |x|^m = (x1^2 + ... + xn^2)^(m/2) for even m >= 0."""
    if m < 0 or m % 2:
        raise DomainError(f"|x|^{m} is not a polynomial; m must be even and non-negative")
    square = MultiPoly(nvars, {tuple(2 if j == i else 0 for j in range(nvars)): 1 for i in range(nvars)})
    return square ** (m // 2)


def is_homogeneous(p: MultiPoly, k: int | None = None) -> bool:
    degrees = {sum(e) for e in p.terms}
    if not degrees:
        return True
    if len(degrees) != 1:
        return False
    return k is None or degrees == {k}


def eval_poly(p: MultiPoly, x: Sequence, exact: bool = False):
    """Evaluate ``p`` at ``x``.

    Args:
        p: Polynomial to evaluate.
        x: Point of length ``p.nvars``.
        exact: When True, coordinates must be int/Fraction and the result is a
            ``Fraction``. Otherwise the result is a float.

    Raises:
        DimensionMismatchError: if ``len(x) != p.nvars``.
    """
    if len(x) != p.nvars:
        raise DimensionMismatchError(f"point has {len(x)} coordinates, expected {p.nvars}")
    if exact:
        pt = [_as_fraction(v) for v in x]
        total = Fraction(0)
        for exp, coeff in p.terms.items():
            term = coeff
            for v, e in zip(pt, exp):
                if e:
                    term *= v ** e
            total += term
        return total
    pt = [float(v) for v in x]
    return math.fsum(float(c) * math.prod(v ** e for v, e in zip(pt, exp) if e) for exp, c in p.terms.items())


def rational_sqrt(q) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    q = _as_fraction(q)
    if q < 0:
        return None
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


# ---------------------------------------------------------------- components
def _square_free(n: int) -> tuple[int, int]:
    """Split ``n`` as ``s**2 * d`` with ``d`` square free; returns ``(s, d)``."""
    s, d = 1, 1
    for prime, mult in sympy.factorint(n).items():
        s *= prime ** (mult // 2)
        if mult % 2:
            d *= prime
    return s, d


@dataclass(frozen=True)
class Component:
    """One coordinate ``scale * sqrt(radicand) * poly`` of a polynomial map."""

    scale: Fraction
    radicand: int
    poly: MultiPoly

    def __post_init__(self):
        object.__setattr__(self, "scale", _as_fraction(self.scale))
        if not isinstance(self.radicand, int) or self.radicand < 1:
            raise DomainError(f"radicand must be a positive integer, got {self.radicand!r}")

    @classmethod
    def make(cls, poly: MultiPoly, scale: Scalar = 1, radicand: int = 1) -> "Component":
        """Build a component, pulling square factors out of the radicand."""
        s, d = _square_free(int(radicand))
        return cls(_as_fraction(scale) * s, d, poly)

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    @property
    def factor(self) -> float:
        """Floating value of ``scale * sqrt(radicand)``."""
        return float(self.scale) * math.sqrt(self.radicand)

    def square(self) -> MultiPoly:
        return (self.poly * self.poly) * (self.scale * self.scale * self.radicand)

    def is_zero(self) -> bool:
        return self.scale == 0 or self.poly.is_zero()

    def with_poly(self, poly: MultiPoly) -> "Component":
        return Component(self.scale, self.radicand, poly)

    def __neg__(self) -> "Component":
        return Component(-self.scale, self.radicand, self.poly)


def component_square_sum(cs: Iterable[Component]) -> MultiPoly:
    """Exact sum of squares of components; raises on mixed variable counts."""
    cs = list(cs)
    if not cs:
        raise DimensionMismatchError("at least one component is required")
    nvars = cs[0].nvars
    total = MultiPoly(nvars)
    for c in cs:
        if c.nvars != nvars:
            raise DimensionMismatchError(f"component in {c.nvars} variables, expected {nvars}")
        total = total + c.square()
    return total


def stack_components(cs: Sequence[Component]) -> tuple[np.ndarray, np.ndarray]:
    """Float monomial tables for vectorised evaluation of a list of components.

    Returns ``(E, C)`` where ``E`` is the ``T x n`` exponent matrix of all
    monomials used and ``C`` is the ``T x N`` coefficient matrix with each
    component's ``scale * sqrt(radicand)`` folded in. The component values at
    points ``X`` (``M x n``) are ``monomials(X, E) @ C``.
    """
    exps = sorted({e for c in cs for e in c.poly.terms}, key=_graded_lex_key, reverse=True)
    index = {e: row for row, e in enumerate(exps)}
    nvars = cs[0].nvars if cs else 0
    E = np.array(exps, dtype=float).reshape(len(exps), nvars)
    C = np.zeros((len(exps), len(cs)))
    for j, c in enumerate(cs):
        f = c.factor
        for e, coeff in c.poly.terms.items():
            C[index[e], j] = f * float(coeff)
    return E, C


def monomials(X: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Evaluate every monomial row of ``E`` at every point row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.prod(X[:, None, :] ** E[None, :, :], axis=2)
