"""Grid scans of g and h, and the verdicts read off them.

A verdict is one-sided evidence at desk scale: ``refuted`` always comes with
witness rows that reproduce the violation, ``consistent`` only means no
violation was seen on the scanned grid.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .limits import DEFAULT_LIMITS, BudgetExceeded, Limits, is_prime
from .measures import GHRecord, gh_record
from .schemes import PolyMorphism

__all__ = [
    "ScanSpec",
    "GHTable",
    "Verdict",
    "InsufficientCoverage",
    "scan_gh",
    "frs_diagnostic",
    "esmooth_diagnostic",
    "jetflat_diagnostic",
    "CSV_HEADER",
    "exact_log",
]

CSV_HEADER = ("p", "k", "y", "raw_count", "singular_count", "g_num", "g_den", "h_num", "h_den")
EXPONENT_TOLERANCE = 0.2
# non-power g values are bracketed by log_p to within 1/LOG_RESOLUTION
LOG_RESOLUTION = 256


class InsufficientCoverage(ValueError):
    pass


@dataclass(frozen=True)
class ScanSpec:
    """What to scan.

    Fibers at each (p, k): every target point mod p^k when there are at most
    ``cap`` of them, otherwise ``cap`` points drawn uniformly (rejection
    sampling, seeded).  ``pinned`` fibers are always added; by default the
    origin is pinned when it lies on the target.
    """

    morphism: PolyMorphism
    primes: tuple[int, ...]
    k_max: int
    cap: int = 256
    seed: int = 0
    pinned: tuple[tuple[int, ...], ...] | None = None
    method: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(sorted(set(int(p) for p in self.primes))))
        if not self.primes:
            raise ValueError("a scan needs at least one prime")
        for p in self.primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if self.cap < 1:
            raise ValueError("cap must be at least 1")
        if self.pinned is not None:
            object.__setattr__(self, "pinned", tuple(tuple(int(v) for v in y) for y in self.pinned))

    def pinned_points(self) -> tuple[tuple[int, ...], ...]:
        if self.pinned is not None:
            return self.pinned
        origin = (0,) * self.morphism.target.ambient_dim
        return (origin,) if all(f.constant_term() == 0 for f in self.morphism.target.equations) else ()

    def echo(self) -> dict:
        phi = self.morphism
        return {
            "morphism": phi.name,
            "source_vars": list(phi.source.variables),
            "source_eqs": [str(f) for f in phi.source.equations],
            "maps": [str(f) for f in phi.components],
            "primes": list(self.primes),
            "k_max": self.k_max,
            "cap": self.cap,
            "seed": self.seed,
            "pinned": [list(y) for y in self.pinned_points()],
            "method": self.method,
        }


@dataclass
class GHTable:
    spec: ScanSpec
    rows: list[GHRecord] = field(default_factory=list)
    truncated: bool = False
    skipped: list[tuple[int, int, tuple[int, ...]]] = field(default_factory=list)

    def __post_init__(self):
        self.rows.sort(key=lambda r: r.key)
        self._index = {r.key: r for r in self.rows}

    def get(self, p: int, k: int, y: Sequence[int]) -> GHRecord | None:
        return self._index.get((p, k, tuple(y)))

    def verdict_rows(self) -> list[GHRecord]:
        return [r for r in self.rows if not r.advisory]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([
                r.p, r.k, ":".join(map(str, r.y)), r.raw_count, r.singular_count,
                r.g.numerator, r.g.denominator, r.h.numerator, r.h.denominator,
            ])
        if self.truncated:
            buf.write(f"# truncated: {len(self.skipped)} cells skipped (budget exceeded)\n")
        return buf.getvalue()

    @staticmethod
    def parse_csv(text: str) -> list[GHRecord]:
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        reader = csv.reader(lines)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        out = []
        for row in reader:
            p, k, y, raw, sing, gn, gd, hn, hd = row
            out.append(GHRecord(
                int(p), int(k), tuple(int(v) for v in y.split(":")) if y else (),
                int(raw), int(sing), Fraction(int(gn), int(gd)), Fraction(int(hn), int(hd)),
            ))
        return out


def _target_points(spec: ScanSpec, p: int, k: int) -> list[tuple[int, ...]]:
    target = spec.morphism.target
    n = target.ambient_dim
    modulus = p**k
    if modulus**n <= spec.cap:
        pts = [y for y in product(range(modulus), repeat=n) if target.contains(y, modulus)]
    else:
        rng = random.Random(f"{spec.seed}:{p}:{k}")
        chosen: set[tuple[int, ...]] = set()
        tries = 0
        while len(chosen) < spec.cap and tries < 1000 * spec.cap:
            tries += 1
            y = tuple(rng.randrange(modulus) for _ in range(n))
            if target.contains(y, modulus):
                chosen.add(y)
        pts = sorted(chosen)
    for y in spec.pinned_points():
        y = tuple(v % modulus for v in y)
        if target.contains(y, modulus) and y not in pts:
            pts.append(y)
    return sorted(pts)


def _cell(args):
    phi, y, p, k, method, limits, advisory = args
    try:
        return gh_record(phi, y, p, k, method, limits, advisory)
    except BudgetExceeded:
        return (p, k, y)


def scan_gh(spec: ScanSpec, limits: Limits = DEFAULT_LIMITS, jobs: int = 1) -> GHTable:
    """One GH row per (prime, level, fiber); deterministic for a fixed ScanSpec."""
    cells = []
    for p in spec.primes:
        advisory = p < limits.prime_floor
        cell_limits = Limits(limits.budget, min(limits.prime_floor, p)) if advisory else limits
        for k in range(1, spec.k_max + 1):
            for y in _target_points(spec, p, k):
                cells.append((spec.morphism, y, p, k, spec.method, cell_limits, advisory))
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell, cells, chunksize=max(1, len(cells) // (4 * jobs))))
    else:
        results = [_cell(c) for c in cells]
    rows = [r for r in results if isinstance(r, GHRecord)]
    skipped = sorted(r for r in results if not isinstance(r, GHRecord))
    return GHTable(spec, rows, truncated=bool(skipped), skipped=skipped)


# ---------------------------------------------------------------- verdicts

def exact_log(x: Fraction, p: int) -> int | None:
    """The integer a with x == p^a, or None."""
    if x <= 0:
        return None
    num, den = x.numerator, x.denominator
    if num != 1 and den != 1:
        return None
    v, a = (num, 1) if den == 1 else (den, -1)
    e = 0
    while v % p == 0:
        v //= p
        e += 1
    return a * e if v == 1 else None


def _frac_json(x: Fraction | None):
    if x is None:
        return None
    return {"num": x.numerator, "den": x.denominator}


@dataclass
class Verdict:
    kind: str
    outcome: str
    fitted: Fraction | None = None
    witnesses: list[GHRecord] = field(default_factory=list)
    constants: dict[str, Fraction | None] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def to_dict(self, spec: ScanSpec | None = None) -> dict:
        fitted_key = {"E-smooth": "E", "jet-flat": "epsilon"}.get(self.kind)
        return {
            "kind": self.kind,
            "outcome": self.outcome,
            "fitted": {fitted_key: _frac_json(self.fitted)} if fitted_key else None,
            "constants": {k: _frac_json(v) for k, v in sorted(self.constants.items())},
            "witnesses": [r.label for r in self.witnesses],
            "notes": list(self.notes),
            "data": self.data,
            "scan": spec.echo() if spec is not None else None,
        }

    def to_json(self, spec: ScanSpec | None = None) -> str:
        return json.dumps(self.to_dict(spec), indent=2, sort_keys=True)


def _reduce(y: tuple[int, ...], p: int, j: int) -> tuple[int, ...]:
    return tuple(v % p**j for v in y)


def _geometric_growth(vals: Sequence[Fraction], p: int) -> bool:
    """Three consecutive values, non-decreasing, growing by at least p overall."""
    a, b, c = vals
    return a > 0 and a <= b <= c and c > a and c >= p * a


def _grows_in_p(series: Sequence[tuple[int, Fraction]]) -> bool:
    """True when some consecutive pair grows at least like sqrt(p)."""
    for (p0, m0), (p1, m1) in zip(series, series[1:]):
        if m0 > 0 and m1 > m0 and (m1 / m0) ** 2 >= Fraction(p1, p0):
            return True
    return False


def _k_growth_witness(table: GHTable, rows: list[GHRecord]) -> list[GHRecord] | None:
    by_p: dict[int, int] = {}
    for r in rows:
        by_p[r.p] = max(by_p.get(r.p, 0), r.k)
    for r in rows:
        k = r.k
        if k < 3 or k != by_p[r.p]:
            continue
        chain = [table.get(r.p, k - 2, _reduce(r.y, r.p, k - 2)), table.get(r.p, k - 1, _reduce(r.y, r.p, k - 1)), r]
        if any(c is None or c.advisory for c in chain):
            continue
        if _geometric_growth([c.g for c in chain], r.p):
            return chain
    return None


def frs_diagnostic(table: GHTable) -> Verdict:
    rows = table.verdict_rows()
    primes = sorted({r.p for r in rows})
    kmax = max((r.k for r in rows), default=0)
    if len(primes) < 2 or kmax < 2:
        raise InsufficientCoverage("FRS diagnostic needs at least 2 primes and k_max >= 2")

    c1: dict[tuple[int, int], tuple[Fraction, GHRecord | None]] = {}
    c2: dict[tuple[int, int], tuple[Fraction, GHRecord | None]] = {}
    for r in rows:
        key = (r.p, r.k)
        v1 = r.h * r.p
        if key not in c1 or v1 > c1[key][0]:
            c1[key] = (v1, r if v1 > 0 else None)
        base = table.get(r.p, 1, _reduce(r.y, r.p, 1))
        if base is not None:
            v2 = abs(r.g - base.g) * r.p
            if key not in c2 or v2 > c2[key][0]:
                c2[key] = (v2, r if v2 > 0 else None)

    C1 = max((v for v, _ in c1.values()), default=Fraction(0))
    C2 = max((v for v, _ in c2.values()), default=Fraction(0))
    constants = {"C1": C1, "C2": C2}
    notes = []

    chain = _k_growth_witness(table, rows)
    if chain is not None:
        notes.append(f"g grows geometrically in k along {chain[-1].label}")
        return Verdict("FRS", "refuted", None, chain, constants, notes)

    growth = False
    for name, cmap in (("C1", c1), ("C2", c2)):
        for k in range(1, kmax + 1):
            series = [(p, cmap[(p, k)][0]) for p in primes if (p, k) in cmap]
            if _grows_in_p(series):
                growth = True
                notes.append(f"{name} grows with p at k={k}")
    witnesses = []
    for cmap, C in ((c1, C1), (c2, C2)):
        for (v, r) in cmap.values():
            if r is not None and v == C and r not in witnesses:
                witnesses.append(r)
                break
    outcome = "inconclusive" if growth else "consistent"
    return Verdict("FRS", outcome, None, witnesses, constants, notes)


def _log_exponent(x: Fraction, p: int) -> tuple[float, bool]:
    a = exact_log(x, p)
    if a is not None:
        return float(a), True
    return math.log(x.numerator) / math.log(p) - math.log(x.denominator) / math.log(p), False


def esmooth_diagnostic(table: GHTable) -> Verdict:
    rows = table.verdict_rows()
    positive = [r for r in rows if r.h > 0]
    if not positive:
        return Verdict("E-smooth", "smooth", None, [], {}, ["all h = 0: E is infinite by convention"])
    if len({r.p for r in positive}) < 2:
        raise InsufficientCoverage("E-smooth diagnostic needs rows with h > 0 at 2 or more primes")

    classes: dict[tuple[int, tuple[int, ...]], list[GHRecord]] = {}
    for r in positive:
        classes.setdefault((r.k, r.y), []).append(r)

    fits = []
    disagreements = []
    flagged = []
    for (k, y), members in sorted(classes.items()):
        if len({r.p for r in members}) < 2:
            continue
        exps = []
        for r in members:
            e, exact = _log_exponent(r.h, r.p)
            exps.append(-e)
            if not exact:
                flagged.append({"row": r.label, "exponent": round(-e, 6)})
        target = round(exps[0])
        if all(round(e) == target and abs(e - target) <= EXPONENT_TOLERANCE for e in exps):
            fits.append((target, k, y, members))
        else:
            disagreements.append({"k": k, "y": list(y), "exponents": [round(e, 6) for e in exps]})

    data = {"flagged_rows": flagged, "disagreements": disagreements,
            "class_exponents": [{"k": k, "y": list(y), "E": e} for e, k, y, _ in fits]}
    if not fits:
        return Verdict("E-smooth", "inconclusive", None, [], {}, ["no class with agreeing exponents"], data)
    E, k, y, members = min(fits, key=lambda t: (t[0], t[1], t[2]))
    notes = []
    if disagreements:
        outcome = "inconclusive"
        notes.append("exponents disagree across primes for some classes")
    elif E >= 1:
        outcome = "consistent"
        notes.append("FRS-consistent")
        if E >= 2:
            notes.append("terminal-consistent")
    else:
        outcome = "refuted"
        notes.append(f"h is of order p^{-E} or larger: not FRS")
    return Verdict("E-smooth", outcome, Fraction(E), sorted(members, key=lambda r: r.key), {}, notes, data)


def _log_floor(x: Fraction, p: int, n: int) -> int:
    """Largest a with p^a <= x^n, so that log_p(x) lies in [a/n, (a+1)/n)."""
    xn = x**n
    a = math.floor(n * math.log(x, p))
    while Fraction(p) ** (a + 1) <= xn:
        a += 1
    while Fraction(p) ** a > xn:
        a -= 1
    return a


def jetflat_diagnostic(table: GHTable, dimY: int, frs: Verdict | None = None) -> Verdict:
    rows = table.verdict_rows()
    if not rows:
        raise InsufficientCoverage("empty table")
    if dimY < 1:
        raise ValueError("dimY must be positive")
    best = Fraction(0)
    best_rows: list[GHRecord] = []
    hi_bound = Fraction(0)
    flagged = []
    for r in rows:
        if r.g <= 1:
            continue
        a = exact_log(r.g, r.p)
        scale = r.k * dimY
        if a is not None:
            v = Fraction(a, scale)
            if v > best:
                best, best_rows = v, [r]
            elif v == best:
                best_rows.append(r)
            hi_bound = max(hi_bound, v)
        else:
            lo = _log_floor(r.g, r.p, LOG_RESOLUTION)
            hi_bound = max(hi_bound, Fraction(lo + 1, LOG_RESOLUTION * scale))
            flagged.append(r.label)
    eps = 1 - best
    data = {
        "epsilon_interval": [_frac_json(1 - max(hi_bound, best)), _frac_json(eps)],
        "non_power_rows": flagged,
    }
    notes = []
    if eps == 1:
        if frs is None or frs.outcome != "refuted":
            notes.append("jet-flat-consistent")
            return Verdict("jet-flat", "consistent", eps, [], {}, notes, data)
        notes.append("epsilon = 1 but the FRS trend check fails")
        return Verdict("jet-flat", "inconclusive", eps, [], {}, notes, data)
    notes.append(f"fibers too large for jet-flatness; consistent with epsilon <= {eps}")
    return Verdict("jet-flat", "refuted", eps, sorted(best_rows, key=lambda r: r.key), {}, notes, data)
