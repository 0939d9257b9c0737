"""Bilinear maps F with |F(x, y)| = |x| |y| and a planner over their compositions.

A family ``[r, s, t]`` is stored as ``r`` matrices ``A_1 .. A_r`` of shape
``t x s`` so that ``F(x, y) = sum_l x_l * (A_l @ y)``. Entries are exact
rationals held in numpy object arrays; every constructor checks the Hurwitz
matrix equations ``A_i^T A_j + A_j^T A_i = 2 delta_ij I_s`` before returning.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from phmaps.errors import ConstructionError, DimensionMismatchError, DomainError
from phmaps.logger import get_logger
from phmaps.polyalg import MultiPoly, variable

logger = get_logger(__name__)


def _exact_matrix(rows) -> np.ndarray:
    arr = np.array([[Fraction(v) for v in row] for row in rows], dtype=object)
    arr.setflags(write=False)
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array([[Fraction(v) for v in row] for row in arr], dtype=object).reshape(arr.shape)
    out.setflags(write=False)
    return out


def _eye(n: int) -> np.ndarray:
    return np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)


def _zeros(t: int, s: int) -> np.ndarray:
    return np.full((t, s), Fraction(0), dtype=object)


def _integral(arr: np.ndarray) -> np.ndarray | None:
    """Exact int64 copy when every entry is an integer, else None."""
    if all(Fraction(v).denominator == 1 for v in arr.flat):
        return np.array([[int(v) for v in row] for row in arr], dtype=np.int64).reshape(arr.shape)
    return None


@dataclass(frozen=True, eq=False)
class HurwitzFamily:
    """Exact bilinear map ``F: R^r x R^s -> R^t``."""

    r: int
    s: int
    t: int
    matrices: tuple

    def __post_init__(self):
        if len(self.matrices) != self.r:
            raise DimensionMismatchError(f"expected {self.r} matrices, got {len(self.matrices)}")
        for a in self.matrices:
            if a.shape != (self.t, self.s):
                raise DimensionMismatchError(f"matrix shape {a.shape}, expected {(self.t, self.s)}")

    @classmethod
    def from_matrices(cls, matrices: Sequence) -> "HurwitzFamily":
        mats = tuple(_frozen(np.asarray(m, dtype=object)) for m in matrices)
        if not mats:
            raise DomainError("a family needs at least one matrix")
        t, s = mats[0].shape
        return cls(len(mats), s, t, mats)

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.r, self.s, self.t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HurwitzFamily):
            return NotImplemented
        return self.triple == other.triple and all(
            bool(np.all(a == b)) for a, b in zip(self.matrices, other.matrices)
        )

    def __hash__(self) -> int:
        return hash((self.triple, tuple(tuple(a.flat) for a in self.matrices)))

    # -------------------------------------------------------------- checks
    def matrix_equations_hold(self) -> bool:
        """Exact check of A_i^T A_j + A_j^T A_i = 2 delta_ij I."""
        ints = [_integral(a) for a in self.matrices]
        if all(m is not None for m in ints):
            mats, eye = ints, np.eye(self.s, dtype=np.int64)
        else:
            mats, eye = list(self.matrices), _eye(self.s)
        for i in range(self.r):
            for j in range(i, self.r):
                sym = mats[i].T @ mats[j] + mats[j].T @ mats[i]
                target = 2 * eye if i == j else 0 * eye
                if not bool(np.all(sym == target)):
                    logger.debug("Hurwitz equation fails for (i, j)=(%s, %s) in %s", i, j, self.triple)
                    return False
        return True

    def components(self, nvars: int | None = None, xvars: Sequence[int] | None = None,
                   yvars: Sequence[int] | None = None) -> list[MultiPoly]:
        """The ``t`` bilinear forms ``F_i(x, y)`` as polynomials.

        By default x occupies variables ``0..r-1`` and y occupies ``r..r+s-1``.
        """
        nvars = self.r + self.s if nvars is None else nvars
        xvars = list(range(self.r)) if xvars is None else list(xvars)
        yvars = list(range(self.r, self.r + self.s)) if yvars is None else list(yvars)
        if len(xvars) != self.r or len(yvars) != self.s:
            raise DimensionMismatchError("variable maps do not match the family shape")
        out = []
        for i in range(self.t):
            terms: dict = {}
            for l, a in enumerate(self.matrices):
                for m in range(self.s):
                    c = a[i, m]
                    if c == 0:
                        continue
                    exp = [0] * nvars
                    exp[xvars[l]] += 1
                    exp[yvars[m]] += 1
                    key = tuple(exp)
                    terms[key] = terms.get(key, Fraction(0)) + c
            out.append(MultiPoly(nvars, terms))
        return out

    def identity_polynomial(self) -> MultiPoly:
        """|F(x, y)|^2 - |x|^2 |y|^2 in ``r + s`` variables; zero for a valid family."""
        nvars = self.r + self.s
        total = MultiPoly(nvars)
        for f in self.components():
            total = total + f * f
        x2 = sum((variable(nvars, l) ** 2 for l in range(self.r)), MultiPoly(nvars))
        y2 = sum((variable(nvars, self.r + m) ** 2 for m in range(self.s)), MultiPoly(nvars))
        return total - x2 * y2

    def polynomial_identity_holds(self) -> bool:
        return self.identity_polynomial().is_zero()

    def evaluate(self, x: Sequence[float], y: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        stack = np.array([[[float(v) for v in row] for row in a] for a in self.matrices])
        return np.einsum("l,lim,m->i", x, stack, y)


def _checked(family: HurwitzFamily, rule: str) -> HurwitzFamily:
    if not family.matrix_equations_hold():
        raise ConstructionError(f"{rule} produced an invalid family {list(family.triple)}")
    return family


# -------------------------------------------------------------- base tables
def _cd_conj(x: list) -> list:
    if len(x) == 1:
        return list(x)
    h = len(x) // 2
    return _cd_conj(x[:h]) + [-v for v in x[h:]]


def _cd_mul(x: list, y: list) -> list:
    # Cayley-Dickson: (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))
    if len(x) == 1:
        return [x[0] * y[0]]
    h = len(x) // 2
    a, b, c, d = x[:h], x[h:], y[:h], y[h:]
    first = [p - q for p, q in zip(_cd_mul(a, c), _cd_mul(_cd_conj(d), b))]
    second = [p + q for p, q in zip(_cd_mul(d, a), _cd_mul(b, _cd_conj(c)))]
    return first + second


@functools.lru_cache(maxsize=None)
def base_algebra(dim: int) -> HurwitzFamily:
    """Multiplication table of R, C, H or O as a ``[dim, dim, dim]`` family.

    Uses the Cayley-Dickson doubling ``(a, b)(c, d) = (ac - d*b, da + bc*)``
    on the standard basis, so ``A_l[:, m]`` holds the coordinates of
    ``e_l * e_m``. For ``dim = 2`` this gives ``A_2 = [[0, -1], [1, 0]]``.
    """
    if dim not in (1, 2, 4, 8):
        raise DomainError(f"normed division algebras exist only in dimensions 1, 2, 4, 8; got {dim}")
    basis = [[int(i == j) for j in range(dim)] for i in range(dim)]
    matrices = []
    for l in range(dim):
        cols = [_cd_mul(basis[l], basis[m]) for m in range(dim)]
        matrices.append(_exact_matrix([[cols[m][i] for m in range(dim)] for i in range(dim)]))
    return _checked(HurwitzFamily(dim, dim, dim, tuple(matrices)), f"base_algebra({dim})")


# ------------------------------------------------------------------ rules
def restrict(F: HurwitzFamily, r: int, s: int) -> HurwitzFamily:
    if not (1 <= r <= F.r and 1 <= s <= F.s):
        raise DomainError(f"cannot restrict {list(F.triple)} to r={r}, s={s}")
    if (r, s) == (F.r, F.s):
        return F
    mats = tuple(_frozen(a[:, :s]) for a in F.matrices[:r])
    return HurwitzFamily(r, s, F.t, mats)


def swap(F: HurwitzFamily) -> HurwitzFamily:
    """Family for ``[s, r, t]`` with ``F'(y, x) = F(x, y)``."""
    stack = np.empty((F.r, F.t, F.s), dtype=object)
    for l, a in enumerate(F.matrices):
        stack[l] = a
    mats = tuple(_frozen(stack[:, :, m].T) for m in range(F.s))
    return HurwitzFamily(F.s, F.r, F.t, mats)


def direct_sum(F1: HurwitzFamily, F2: HurwitzFamily) -> HurwitzFamily:
    """``G((x, x'), y) = (F1(x, y), F2(x', y))`` for families sharing ``s``."""
    if F1.s != F2.s:
        raise DimensionMismatchError(f"direct_sum needs equal s, got {F1.s} and {F2.s}")
    t = F1.t + F2.t
    mats = []
    for a in F1.matrices:
        m = _zeros(t, F1.s)
        m[: F1.t, :] = a
        mats.append(_frozen(m))
    for a in F2.matrices:
        m = _zeros(t, F1.s)
        m[F1.t:, :] = a
        mats.append(_frozen(m))
    return HurwitzFamily(F1.r + F2.r, F1.s, t, tuple(mats))


def _as_signed_permutation(a: np.ndarray) -> tuple[list[int], list[int]] | None:
    """Return ``(rho, tau)`` with ``a e_m = tau_m e_rho(m)``, or None."""
    n = a.shape[1]
    rho, tau = [], []
    for m in range(n):
        nz = [i for i in range(a.shape[0]) if a[i, m] != 0]
        if len(nz) != 1 or abs(a[nz[0], m]) != 1:
            return None
        rho.append(nz[0])
        tau.append(int(a[nz[0], m]))
    return rho, tau


def _commuting_complex_structure(structures: list[np.ndarray], t: int) -> np.ndarray | None:
    """Search a skew signed permutation Q with Q^2 = -I commuting with every J.

    ``Q e_m = sigma_m e_pi(m)``. Skewness forces ``pi`` to be a fixed-point-free
    involution with ``sigma_pi(m) = -sigma_m``; commuting with ``J`` (given as
    ``rho, tau``) forces ``pi(rho(m)) = rho(pi(m))`` and
    ``sigma_rho(m) = sigma_m * tau_pi(m) * tau_m``.
    """
    perms = []
    for j in structures:
        sp = _as_signed_permutation(j)
        if sp is None:
            return None
        perms.append(sp)

    def propagate(pi: dict, sigma: dict, queue: list) -> bool:
        while queue:
            m = queue.pop()
            pending = [(pi[m], m, -sigma[m])]
            for rho, tau in perms:
                pending.append((rho[m], rho[pi[m]], sigma[m] * tau[pi[m]] * tau[m]))
            for src, dst, sgn in pending:
                if src in pi:
                    if pi[src] != dst or sigma[src] != sgn:
                        return False
                    continue
                if src == dst or dst in pi:
                    return False
                pi[src], sigma[src] = dst, sgn
                pi[dst], sigma[dst] = src, -sgn
                queue.extend((src, dst))
        return True

    def search(pi: dict, sigma: dict) -> tuple[dict, dict] | None:
        free = [m for m in range(t) if m not in pi]
        if not free:
            return pi, sigma
        m = free[0]
        for c in free[1:]:
            for sgn in (1, -1):
                p2, s2 = dict(pi), dict(sigma)
                p2[m], s2[m] = c, sgn
                p2[c], s2[c] = m, -sgn
                if propagate(p2, s2, [m, c]):
                    found = search(p2, s2)
                    if found is not None:
                        return found
        return None

    if t % 2:
        return None
    found = search({}, {})
    if found is None:
        return None
    pi, sigma = found
    q = _zeros(t, t)
    for m in range(t):
        q[pi[m], m] = Fraction(sigma[m])
    return q


def double(F: HurwitzFamily) -> HurwitzFamily:
    """Classical step ``[r, t, t] -> [r + 2, 2t, 2t]``.

    After normalising so that ``A_1 = I`` the remaining matrices are
    anticommuting complex structures ``J_1 .. J_q`` (``q = r - 1``). On
    ``R^{2t}`` the new family is ``I``, ``diag(J_i, -J_i)``,
    ``[[0, -I], [I, 0]]`` and ``[[0, Q], [Q, 0]]`` where ``Q`` is a skew
    complex structure commuting with every ``J_i``. ``Q = J_1 ... J_q`` works
    when ``q = 1 (mod 4)``; otherwise a signed permutation is searched.

    Raises:
        DimensionMismatchError: if ``s != t``.
        ConstructionError: if no suitable ``Q`` exists or the result fails the
            exact identity check.
    """
    if F.s != F.t:
        raise DimensionMismatchError(f"double needs s == t, got {list(F.triple)}")
    t = F.t
    a1t = F.matrices[0].T
    js = [a @ a1t for a in F.matrices[1:]]
    eye = _eye(t)

    q = None
    if js:
        prod = functools.reduce(lambda u, v: u @ v, js)
        commutes = all(bool(np.all(prod @ j == j @ prod)) for j in js)
        if commutes and bool(np.all(prod.T == -prod)) and bool(np.all(prod @ prod == -eye)):
            q = prod
    if q is None:
        q = _commuting_complex_structure(js, t)
    if q is None:
        raise ConstructionError(
            f"no complex structure commutes with the family {list(F.triple)}; cannot double"
        )

    def block(tl, tr, bl, br) -> np.ndarray:
        m = _zeros(2 * t, 2 * t)
        m[:t, :t], m[:t, t:], m[t:, :t], m[t:, t:] = tl, tr, bl, br
        return _frozen(m)

    zero = _zeros(t, t)
    mats = [block(eye, zero, zero, eye)]
    mats += [block(j, zero, zero, -j) for j in js]
    mats.append(block(zero, -eye, eye, zero))
    mats.append(block(zero, q, q, zero))
    out = HurwitzFamily(F.r + 2, 2 * t, 2 * t, tuple(mats))
    return _checked(out, f"double({list(F.triple)})")


def hurwitz_radon_number(n: int) -> int:
    """rho(n): the largest r for which an ``[r, n, n]`` family exists."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    a, b = divmod(e, 4)
    return 8 * a + 2 ** b


def asymptotic_family(a: int, k: int) -> HurwitzFamily:
    """``[2ak, 2^k, a 2^k]``: ``a`` copies of the ``k - 1`` times doubled complex table."""
    if a < 1 or k < 1:
        raise DomainError("a and k must be positive")
    fam = base_algebra(2)
    for _ in range(k - 1):
        fam = double(fam)
    out = fam
    for _ in range(a - 1):
        out = direct_sum(out, fam)
    return out


def asymptotic_t_bound(m: int) -> tuple[int, int, int]:
    """Return ``(a, k, t)`` with ``2ak >= m``, ``2^k >= m`` and ``t = a 2^k >= t_min(m, m)``."""
    if m < 1:
        raise DomainError("m must be positive")
    k = max(1, (m - 1).bit_length())
    a = -(-m // (2 * k))
    return a, k, a * 2 ** k


# ---------------------------------------------------------------- planner
@dataclass(frozen=True)
class TriplePlan:
    """Derivation tree of a Hurwitz triple; replay with :func:`replay`."""

    r: int
    s: int
    t: int
    rule: str
    args: tuple = ()
    children: tuple = ()
    key: str = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        inner = ",".join([str(a) for a in self.args] + [c.key for c in self.children])
        object.__setattr__(self, "key", f"{self.rule}({inner})")

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.r, self.s, self.t)

    @property
    def rank(self) -> tuple[int, int, str]:
        """Ordering used to pick between plans: t, then key length, then key."""
        return (self.t, len(self.key), self.key)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


def plan_base(dim: int) -> TriplePlan:
    return TriplePlan(dim, dim, dim, "base", (dim,))


def plan_restrict(p: TriplePlan, r: int, s: int) -> TriplePlan:
    if (r, s) == (p.r, p.s):
        return p
    if p.rule == "restrict":
        p = p.children[0]
    return TriplePlan(r, s, p.t, "restrict", (r, s), (p,))


def plan_swap(p: TriplePlan) -> TriplePlan:
    if p.rule == "swap":
        return p.children[0]
    return TriplePlan(p.s, p.r, p.t, "swap", (), (p,))


def plan_sum(p1: TriplePlan, p2: TriplePlan) -> TriplePlan:
    return TriplePlan(p1.r + p2.r, p1.s, p1.t + p2.t, "sum", (), (p1, p2))


def plan_double(p: TriplePlan) -> TriplePlan:
    return TriplePlan(p.r + 2, 2 * p.s, 2 * p.t, "double", (), (p,))


def trivial_plan(r: int, s: int) -> TriplePlan:
    """``[r, s, rs]`` from sums of ``[1, 1, 1]``; always available."""
    col = plan_base(1)
    for _ in range(r - 1):
        col = plan_sum(col, plan_base(1))
    row = plan_swap(col)  # [1, r, r]
    acc = row
    for _ in range(s - 1):
        acc = plan_sum(acc, row)
    return plan_swap(acc)


def replay(plan: TriplePlan, _memo: dict | None = None) -> HurwitzFamily:
    """Rebuild the family a plan describes; every step is identity-checked."""
    memo = {} if _memo is None else _memo
    if plan.key in memo:
        return memo[plan.key]
    kids = [replay(c, memo) for c in plan.children]
    if plan.rule == "base":
        fam = base_algebra(plan.args[0])
    elif plan.rule == "restrict":
        fam = restrict(kids[0], *plan.args)
    elif plan.rule == "swap":
        fam = swap(kids[0])
    elif plan.rule == "sum":
        fam = direct_sum(kids[0], kids[1])
    elif plan.rule == "double":
        fam = double(kids[0])
    else:
        raise DomainError(f"unknown rule {plan.rule!r}")
    if fam.triple != plan.triple:
        raise ConstructionError(f"plan {plan.key} replayed to {list(fam.triple)}")
    memo[plan.key] = fam
    return fam


class HurwitzPlanner:
    """Best-first table of upper bounds on ``t_min(r, s)``.

    The table holds, for every ``r, s <= cap``, the cheapest plan found.
    Restriction and swap are closed over after every round at no cost; each
    round then tries all direct sums with equal ``s`` and all doublings of
    square entries ``[r, t, t]``. Ties break on the shortest, then the
    lexicographically smallest plan key, so results do not depend on
    iteration order.
    """

    def __init__(self, cap: int = 16, budget: int = 6):
        self.cap = cap
        self.budget = budget
        self.best: dict[tuple[int, int], TriplePlan] = {}
        self._failed: set[str] = set()
        self._memo: dict = {}
        self.rounds_run = 0

    @staticmethod
    def _better(new: TriplePlan, old: TriplePlan | None) -> bool:
        return old is None or new.rank < old.rank

    def _offer(self, plan: TriplePlan) -> bool:
        if plan.r > self.cap or plan.s > self.cap:
            return False
        slot = (plan.r, plan.s)
        if self._better(plan, self.best.get(slot)):
            self.best[slot] = plan
            return True
        return False

    def _close(self) -> None:
        changed = True
        while changed:
            changed = False
            for (r, s), plan in sorted(self.best.items()):
                changed |= self._offer(plan_swap(plan))
            # restriction: sweep from large to small so the minimum propagates
            for r in range(self.cap, 0, -1):
                for s in range(self.cap, 0, -1):
                    for src in ((r + 1, s), (r, s + 1)):
                        plan = self.best.get(src)
                        if plan is not None:
                            changed |= self._offer(plan_restrict(plan, r, s))

    def _try_double(self, plan: TriplePlan) -> TriplePlan | None:
        cand = plan_double(plan)
        if cand.key in self._failed:
            return None
        if cand.r > hurwitz_radon_number(cand.s):
            self._failed.add(cand.key)
            return None
        try:
            replay(cand, self._memo)
        except ConstructionError as exc:
            logger.debug("Doubling rejected for %s: %s", plan.key, exc)
            self._failed.add(cand.key)
            return None
        return cand

    def run(self) -> "HurwitzPlanner":
        for dim in (1, 2, 4, 8):
            if dim <= self.cap:
                self._offer(plan_base(dim))
        self._close()
        for round_no in range(self.budget):
            improved = False
            snapshot = sorted(self.best.items())
            by_s: dict[int, list[TriplePlan]] = {}
            for (r, s), plan in snapshot:
                by_s.setdefault(s, []).append(plan)
            for s, plans in sorted(by_s.items()):
                for i, p1 in enumerate(plans):
                    for p2 in plans[i:]:
                        if p1.r + p2.r <= self.cap:
                            improved |= self._offer(plan_sum(p1, p2))
            for (r, s), plan in snapshot:
                if plan.t == s and 2 * s <= self.cap:
                    current = self.best.get((r + 2, 2 * s))
                    if current is not None and current.t <= 2 * s:
                        continue
                    cand = self._try_double(plan)
                    if cand is not None:
                        improved |= self._offer(cand)
            self._close()
            self.rounds_run = round_no + 1
            logger.debug("Planner round %s finished with %s entries", round_no + 1, len(self.best))
            if not improved:
                break
        return self

    def lookup(self, r: int, s: int) -> TriplePlan:
        plan = self.best.get((r, s))
        fallback = trivial_plan(r, s)
        if plan is None or fallback.t < plan.t:
            return fallback
        return plan


@functools.lru_cache(maxsize=16)
def _planner(cap: int, budget: int) -> HurwitzPlanner:
    return HurwitzPlanner(cap=cap, budget=budget).run()


def best_t(r: int, s: int, budget: int = 6) -> tuple[int, TriplePlan]:
    """Smallest ``t`` reachable for ``[r, s, t]`` within ``budget`` rounds.

    This is an upper bound on ``t_min(r, s)``, returned with a replayable plan.
    """
    if r < 1 or s < 1:
        raise DomainError(f"r and s must be positive, got ({r}, {s})")
    cap = max(16, 2 * max(r, s))
    plan = _planner(cap, budget).lookup(r, s)
    return plan.t, plan


def family_for(m: int, budget: int = 6) -> HurwitzFamily:
    """The best ``[m, m, t]`` family the planner knows, replayed and checked."""
    _, plan = best_t(m, m, budget)
    return replay(plan)


def random_derivation(rng, max_rs: int = 10, max_t: int = 64, steps: int = 4) -> TriplePlan:
    """Random valid plan within the given size limits; used by property tests."""
    plan = plan_base(int(rng.choice([1, 2, 4, 8])))
    for _ in range(steps):
        rule = rng.choice(["restrict", "swap", "sum", "double"])
        if rule == "restrict":
            plan = plan_restrict(plan, int(rng.integers(1, plan.r + 1)), int(rng.integers(1, plan.s + 1)))
        elif rule == "swap":
            plan = plan_swap(plan)
        elif rule == "sum":
            other = plan if rng.integers(2) else trivial_plan(1, plan.s)
            if plan.r + other.r <= max_rs and plan.t + other.t <= max_t:
                plan = plan_sum(plan, other)
        else:
            cand = plan_double(plan)
            if (plan.s == plan.t and cand.r <= max_rs and cand.s <= max_rs and cand.t <= max_t
                    and cand.r <= hurwitz_radon_number(cand.s)):
                try:
                    replay(cand)
                    plan = cand
                except ConstructionError:
                    logger.debug("Random derivation skipped failing %s", cand.key)
    return plan
