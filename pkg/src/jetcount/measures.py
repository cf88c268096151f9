"""Normalised fiber counts g and h, and Lang-Weil style constants.

For a morphism phi with relative dimension d and a target point y mod p^k,

    g(y, k) = #phi^-1(y) / p^(k d)
    h(y, k) = #(phi^-1(y) with singular reduction mod p) / p^(k d)

Both are exact :class:`fractions.Fraction` values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .counting import count_fiber, count_points
from .limits import DEFAULT_LIMITS, Limits
from .schemes import AffineScheme, PolyMorphism

__all__ = [
    "GHRecord",
    "gh_record",
    "g_value",
    "h_value",
    "ComponentEstimate",
    "estimate_components",
    "DimensionEstimate",
    "ZeroCountError",
    "estimate_dimension",
    "LangWeilReport",
    "langweil_check",
]


def _scale(p: int, k: int, d: int) -> Fraction:
    return Fraction(p) ** (k * d)


@dataclass(frozen=True)
class GHRecord:
    p: int
    k: int
    y: tuple[int, ...]
    raw_count: int
    singular_count: int
    g: Fraction
    h: Fraction
    advisory: bool = False

    @property
    def key(self) -> tuple[int, int, tuple[int, ...]]:
        return (self.p, self.k, self.y)

    @property
    def label(self) -> str:
        return f"p={self.p},k={self.k},y={':'.join(map(str, self.y))}"


def g_value(phi: PolyMorphism, y: Sequence[int], p: int, k: int, method: str = "auto",
            limits: Limits = DEFAULT_LIMITS) -> Fraction:
    n = count_fiber(phi, y, p, k, "all", method, limits).count
    return Fraction(n) / _scale(p, k, phi.relative_dim)


def h_value(phi: PolyMorphism, y: Sequence[int], p: int, k: int, method: str = "auto",
            limits: Limits = DEFAULT_LIMITS) -> Fraction:
    n = count_fiber(phi, y, p, k, "singular", method, limits).count
    return Fraction(n) / _scale(p, k, phi.relative_dim)


def gh_record(phi: PolyMorphism, y: Sequence[int], p: int, k: int, method: str = "auto",
              limits: Limits = DEFAULT_LIMITS, advisory: bool = False) -> GHRecord:
    raw = count_fiber(phi, y, p, k, "all", method, limits)
    sing = count_fiber(phi, y, p, k, "singular", method, limits)
    scale = _scale(p, k, phi.relative_dim)
    modulus = p**k
    return GHRecord(
        p, k, tuple(int(v) % modulus for v in y), raw.count, sing.count,
        Fraction(raw.count) / scale, Fraction(sing.count) / scale, advisory,
    )


# ---------------------------------------------------------------- Lang-Weil

def _fp_counts(Z: AffineScheme, primes: Sequence[int], limits: Limits) -> list[int]:
    out = []
    for p in primes:
        limits.check_prime(p)
        out.append(count_points(Z, p, 1, limits=limits).count)
    return out


@dataclass(frozen=True)
class ComponentEstimate:
    scheme: str
    primes: tuple[int, ...]
    ratios: tuple[Fraction, ...]
    C: int
    stable: bool


def _round_half(r: Fraction) -> tuple[int, bool]:
    """Nearest integer, and False when ``r`` sits exactly halfway."""
    fl = math.floor(r)
    frac = r - fl
    if frac == Fraction(1, 2):
        return fl, False
    return (fl + 1 if frac > Fraction(1, 2) else fl), True


def estimate_components(Z: AffineScheme, primes: Sequence[int], limits: Limits = DEFAULT_LIMITS) -> ComponentEstimate:
    """Estimate the number of top-dimensional components from F_p point counts.

    ``C`` is the nearest integer to the ratio at the largest prime; the
    estimate is stable when every ratio lies strictly within 1/2 of ``C``.
    """
    primes = tuple(primes)
    if len(primes) < 3:
        raise ValueError("component estimation needs at least 3 primes")
    counts = _fp_counts(Z, primes, limits)
    ratios = tuple(Fraction(c) / Fraction(p) ** Z.declared_dim for c, p in zip(counts, primes))
    largest = max(range(len(primes)), key=lambda i: primes[i])
    C, clean = _round_half(ratios[largest])
    stable = clean and all(abs(r - C) < Fraction(1, 2) for r in ratios)
    return ComponentEstimate(Z.name, primes, ratios, C, stable)


class ZeroCountError(ValueError):
    """A prime with no points: the log-log fit only gives a lower bound there."""


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    residual: float
    primes: tuple[int, ...]
    counts: tuple[int, ...]


def estimate_dimension(Z: AffineScheme, primes: Sequence[int], limits: Limits = DEFAULT_LIMITS) -> DimensionEstimate:
    """Least-squares slope of log #Z(F_p) against log p."""
    primes = tuple(primes)
    if len(primes) < 2:
        raise ValueError("dimension estimation needs at least 2 primes")
    counts = tuple(_fp_counts(Z, primes, limits))
    zero = [p for p, c in zip(primes, counts) if c == 0]
    if zero:
        raise ZeroCountError(f"{Z.name} has no F_p points for p in {zero}; slope is a lower bound only")
    x = np.log(np.array(primes, dtype=float))
    y = np.log(np.array(counts, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, _), res, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(res[0]) if res.size else 0.0
    return DimensionEstimate(float(slope), residual, primes, counts)


@dataclass(frozen=True)
class LangWeilRow:
    p: int
    count: int
    ratio: Fraction
    deviation_sq: Fraction

    @property
    def deviation(self) -> float:
        return math.sqrt(self.deviation_sq)


@dataclass(frozen=True)
class LangWeilReport:
    scheme: str
    C: int
    rows: tuple[LangWeilRow, ...] = field(default_factory=tuple)

    @property
    def max_deviation_sq(self) -> Fraction:
        return max((r.deviation_sq for r in self.rows), default=Fraction(0))

    @property
    def empirical_constant(self) -> float:
        return math.sqrt(self.max_deviation_sq)


def langweil_check(Z: AffineScheme, C: int, primes: Sequence[int], limits: Limits = DEFAULT_LIMITS) -> LangWeilReport:
    """Per-prime deviation ``|#Z(F_p)/p^dim - C| * sqrt(p)``, kept exactly as its square."""
    primes = tuple(primes)
    counts = _fp_counts(Z, primes, limits)
    rows = []
    for p, c in zip(primes, counts):
        ratio = Fraction(c) / Fraction(p) ** Z.declared_dim
        rows.append(LangWeilRow(p, c, ratio, (ratio - C) ** 2 * p))
    return LangWeilReport(Z.name, C, tuple(rows))
