"""Exact point counts over Z/p^k, F_p and F_p[t]/(t^e).

Two counters share one contract:

* the naive counter enumerates every point of (Z/p^k)^m with numpy in
  fixed-size chunks;
* the tree counter lifts solutions level by level.  At a node ``x`` known
  mod p^j it keeps the exact residual ``F(x) / p^j`` and solves the
  linearised system ``J(x) v = -F(x)/p^j (mod p)``; children are
  ``x + p^j v``.  When the Jacobian has full row rank at a node of a
  complete-intersection system the whole subtree is counted in closed form.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .limits import DEFAULT_LIMITS, BudgetExceeded, Limits, is_prime
from .linalg import solve_mod_p
from .polyring import IntPoly, partial_derivative
from .schemes import AffineScheme, PolyMorphism, SchemeError, singular_reduction_set

__all__ = [
    "CountQuery",
    "CountResult",
    "count_points_naive",
    "count_points_tree",
    "count_points",
    "count_fiber",
    "count_points_jetring",
    "run_query",
    "FILTERS",
    "METHODS",
]

FILTERS = ("all", "singular")
METHODS = ("naive", "tree", "auto")

_CHUNK = 1 << 18
# naive enumeration is preferred by "auto" below this many points
_AUTO_NAIVE_LIMIT = 1 << 17


@dataclass(frozen=True)
class CountResult:
    count: int
    nodes_visited: int
    method: str
    wall_time: float


@dataclass(frozen=True)
class CountQuery:
    """A scheme, or a morphism fiber over ``y``, to count mod p^k."""

    p: int
    k: int
    scheme: AffineScheme | None = None
    morphism: PolyMorphism | None = None
    y: tuple[int, ...] | None = None
    filter: str = "all"
    method: str = "auto"

    def __post_init__(self):
        if (self.scheme is None) == (self.morphism is None):
            raise ValueError("give exactly one of scheme or morphism")
        if self.morphism is not None and self.y is None:
            raise ValueError("a fiber query needs a target point y")
        if self.filter not in FILTERS:
            raise ValueError(f"filter must be one of {FILTERS}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.k < 1:
            raise ValueError("level k must be at least 1")


def run_query(q: CountQuery, limits: Limits = DEFAULT_LIMITS) -> CountResult:
    if q.scheme is not None:
        if q.filter != "all":
            raise ValueError("the singular filter needs a morphism")
        return count_points(q.scheme, q.p, q.k, method=q.method, limits=limits)
    return count_fiber(q.morphism, q.y, q.p, q.k, filter=q.filter, method=q.method, limits=limits)


# ---------------------------------------------------------------- helpers

def _compile(f: IntPoly):
    return [(c, tuple((i, e) for i, e in enumerate(exps) if e)) for exps, c in f.terms.items()]


def _eval_compiled(terms, x) -> int:
    total = 0
    for c, factors in terms:
        t = c
        for i, e in factors:
            t *= x[i] ** e if e > 1 else x[i]
        total += t
    return total


def _check_prime(p: int, limits: Limits) -> None:
    # the prime floor is not applied to literal counts
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


# ---------------------------------------------------------------- naive

def _naive(
    equations: Sequence[IntPoly],
    m: int,
    modulus: int,
    limits: Limits,
    what: str,
    reduce_p: int | None = None,
    allowed: frozenset | None = None,
) -> tuple[int, int]:
    total = modulus**m
    limits.require(what, total * max(1, len(equations)))
    if m == 0:
        ok = all(f.constant_term() % modulus == 0 for f in equations)
        if allowed is not None:
            ok = ok and () in allowed
        return int(ok), 1
    compiled = [[(c % modulus, fac) for c, fac in _compile(f)] for f in equations]
    allowed_codes = None
    if allowed is not None:
        allowed_codes = np.array(
            sorted(sum(v * reduce_p ** (m - 1 - i) for i, v in enumerate(pt)) for pt in allowed), dtype=np.int64
        )
    dtype = np.int64 if modulus < (1 << 31) else object
    count = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        coords = [None] * m
        rem = idx
        # coordinate 0 is the most significant digit: lexicographic order
        for i in range(m - 1, -1, -1):
            coords[i] = (rem % modulus).astype(dtype)
            rem = rem // modulus
        ok = np.ones(idx.shape[0], dtype=bool)
        powers: dict[tuple[int, int], np.ndarray] = {}

        def power(i, e):
            key = (i, e)
            if key not in powers:
                powers[key] = coords[i] if e == 1 else power(i, e - 1) * coords[i] % modulus
            return powers[key]

        for terms in compiled:
            val = np.zeros(idx.shape[0], dtype=dtype)
            for c, factors in terms:
                t = np.full(idx.shape[0], c, dtype=dtype)
                for i, e in factors:
                    t = t * power(i, e) % modulus
                val = (val + t) % modulus
            ok &= val == 0
        if allowed_codes is not None:
            code = np.zeros(idx.shape[0], dtype=np.int64)
            for i in range(m):
                code = code * reduce_p + (coords[i] % reduce_p).astype(np.int64)
            ok &= np.isin(code, allowed_codes)
        count += int(ok.sum())
    return count, total


def count_points_naive(X: AffineScheme, p: int, k: int, limits: Limits = DEFAULT_LIMITS) -> CountResult:
    """Count x in (Z/p^k)^m with every equation of ``X`` vanishing mod p^k."""
    _check_prime(p, limits)
    if k < 1:
        raise ValueError("level k must be at least 1")
    t0 = time.perf_counter()
    count, nodes = _naive(X.equations, X.ambient_dim, p**k, limits, f"naive count of {X.name} mod {p}^{k}")
    return CountResult(count, nodes, "naive", time.perf_counter() - t0)


# ---------------------------------------------------------------- tree

class _Tree:
    def __init__(self, equations, m, p, k, ci, limits, what):
        self.eqs = [_compile(f) for f in equations]
        self.jac = [[_compile(partial_derivative(f, v)) for v in f.variables] for f in equations]
        self.m, self.p, self.k = m, p, k
        self.l = len(equations)
        self.ci = ci
        self.limits = limits
        self.what = what
        self.nodes = 0
        self.work = 0

    def _tick(self, cost):
        self.nodes += 1
        self.work += cost
        if self.work > self.limits.budget:
            raise BudgetExceeded(self.what, self.work, self.limits.budget)

    def residual(self, x):
        return [_eval_compiled(f, x) for f in self.eqs]

    def subtree(self, x: list[int], resid: list[int], j: int) -> int:
        """Points mod p^k above ``x`` (known mod p^j); ``resid`` is ``F(x)/p^j`` exactly."""
        p, k, m = self.p, self.k, self.m
        self._tick(self.l * (m + 1))
        if j == k:
            return 1
        J = [[_eval_compiled(d, x) % p for d in row] for row in self.jac]
        rank, space = solve_mod_p(J, [-r % p for r in resid], p, ncols=m)
        if self.ci and rank == self.l:
            return p ** ((k - j) * (m - self.l))
        if space is None:
            return 0
        if j + 1 == k:
            return len(space)
        pj = p**j
        nxt = pj * p
        total = 0
        for v in space:
            y = [a + pj * b for a, b in zip(x, v)]
            F = self.residual(y)
            # exact division: the linearised step guarantees p^(j+1) | F(y)
            total += self.subtree(y, [f // nxt for f in F], j + 1)
        return total

    def run(self, allowed: frozenset | None = None) -> int:
        p = self.p
        self.limits.require(self.what, p**self.m)
        total = 0
        for x in product(range(p), repeat=self.m):
            if allowed is not None and x not in allowed:
                continue
            F = self.residual(x)
            if any(f % p for f in F):
                self._tick(self.l)
                continue
            total += self.subtree(list(x), [f // p for f in F], 1)
        return total


def _tree(equations, m, p, k, ci, limits, what, allowed=None) -> tuple[int, int]:
    if m == 0:
        ok = all(f.constant_term() % p**k == 0 for f in equations)
        if allowed is not None:
            ok = ok and () in allowed
        return int(ok), 1
    t = _Tree(equations, m, p, k, ci, limits, what)
    return t.run(allowed), t.nodes


def count_points_tree(X: AffineScheme, p: int, k: int, limits: Limits = DEFAULT_LIMITS) -> CountResult:
    """Same count as :func:`count_points_naive`, by level-by-level lifting."""
    _check_prime(p, limits)
    if k < 1:
        raise ValueError("level k must be at least 1")
    t0 = time.perf_counter()
    count, nodes = _tree(X.equations, X.ambient_dim, p, k, X.ci, limits, f"tree count of {X.name} mod {p}^{k}")
    return CountResult(count, nodes, "tree", time.perf_counter() - t0)


def _pick(method: str, p: int, k: int, m: int) -> str:
    if method != "auto":
        return method
    return "naive" if p ** (k * m) <= _AUTO_NAIVE_LIMIT else "tree"


def count_points(X: AffineScheme, p: int, k: int, method: str = "auto", limits: Limits = DEFAULT_LIMITS) -> CountResult:
    method = _pick(method, p, k, X.ambient_dim)
    if method == "naive":
        return count_points_naive(X, p, k, limits)
    if method == "tree":
        return count_points_tree(X, p, k, limits)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- fibers

def _normalize_target(phi: PolyMorphism, y: Sequence[int], p: int, k: int) -> tuple[int, ...]:
    modulus = p**k
    y = tuple(int(v) % modulus for v in y)
    if len(y) != phi.target.ambient_dim:
        raise SchemeError(f"target point {y} should have {phi.target.ambient_dim} coordinates")
    if not phi.target.contains(y, modulus):
        raise SchemeError(f"target point {y} is not on {phi.target.name} mod {p}^{k}")
    return y


def count_fiber(
    phi: PolyMorphism,
    y: Sequence[int],
    p: int,
    k: int,
    filter: str = "all",
    method: str = "auto",
    limits: Limits = DEFAULT_LIMITS,
) -> CountResult:
    """Count source points x mod p^k with phi(x) = y mod p^k.

    ``filter="singular"`` keeps only points whose reduction mod p is a
    non-smooth point of ``phi``.
    """
    _check_prime(p, limits)
    if k < 1:
        raise ValueError("level k must be at least 1")
    if filter not in FILTERS:
        raise ValueError(f"filter must be one of {FILTERS}")
    y = _normalize_target(phi, y, p, k)
    fiber = phi.fiber_scheme(y)
    allowed = None
    if filter == "singular":
        allowed = singular_reduction_set(phi, p, limits)
        if not allowed:
            return CountResult(0, 0, _pick(method, p, k, fiber.ambient_dim), 0.0)
    method = _pick(method, p, k, fiber.ambient_dim)
    t0 = time.perf_counter()
    what = f"fiber of {phi.name} over {y} mod {p}^{k}"
    if method == "naive":
        count, nodes = _naive(fiber.equations, fiber.ambient_dim, p**k, limits, what, p, allowed)
    elif method == "tree":
        count, nodes = _tree(fiber.equations, fiber.ambient_dim, p, k, fiber.ci, limits, what, allowed)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CountResult(count, nodes, method, time.perf_counter() - t0)


# ---------------------------------------------------------------- F_p[t]/(t^e)

def _series_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    e = a.shape[0]
    out = np.zeros_like(a)
    for i in range(e):
        for j in range(e - i):
            out[i + j] += a[i] * b[j]
    return out % p


def count_points_jetring(X: AffineScheme, p: int, e: int, limits: Limits = DEFAULT_LIMITS) -> CountResult:
    """Count points of ``X`` with coordinates in F_p[t]/(t^e)."""
    _check_prime(p, limits)
    if e < 1:
        raise ValueError("truncation length must be at least 1")
    m = X.ambient_dim
    total = p ** (e * m)
    limits.require(f"jet-ring count of {X.name} over F_{p}[t]/(t^{e})", total * max(1, len(X.equations)))
    t0 = time.perf_counter()
    if m == 0:
        ok = all(f.constant_term() % p == 0 for f in X.equations)
        return CountResult(int(ok), 1, "jetring", time.perf_counter() - t0)
    compiled = [_compile(f) for f in X.equations]
    digits = e * m
    count = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        n = idx.shape[0]
        flat = [None] * digits
        rem = idx
        for d in range(digits - 1, -1, -1):
            flat[d] = rem % p
            rem = rem // p
        # coordinate i has coefficients flat[i*e : (i+1)*e], constant term first
        series = [np.stack(flat[i * e:(i + 1) * e]) for i in range(m)]
        powers: dict[tuple[int, int], np.ndarray] = {}

        def power(i, k):
            if (i, k) not in powers:
                powers[(i, k)] = series[i] if k == 1 else _series_mul(power(i, k - 1), series[i], p)
            return powers[(i, k)]

        ok = np.ones(n, dtype=bool)
        for terms in compiled:
            val = np.zeros((e, n), dtype=np.int64)
            for c, factors in terms:
                t = np.zeros((e, n), dtype=np.int64)
                t[0] = c % p
                for i, k in factors:
                    t = _series_mul(t, power(i, k), p)
                val = (val + t) % p
            ok &= ~val.any(axis=0)
        count += int(ok.sum())
    return CountResult(count, total, "jetring", time.perf_counter() - t0)
