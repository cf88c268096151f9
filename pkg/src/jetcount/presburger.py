"""Constructible functions in one natural variable ``s``.

A function is a finite sum of terms

    c * q^(alpha(s)) * beta_1(s) * ... * beta_r(s) * 1/(1 - q^a_1) * ...

with ``alpha`` and the ``beta_j`` affine in ``s`` and nonzero integers
``a_j``.  The domain is an arithmetic progression ``{s >= s0 : s = c mod r}``.
``q`` stays symbolic until evaluation.

Text format, one function per string::

    s * q^(-s) ; s >= 1
    2 * s^2 * q^(2s-1) * geom(-1,-2) - (s-1) ; s >= 0 mod 2 0
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .counting import count_points
from .limits import DEFAULT_LIMITS, Limits
from .schemes import AffineScheme

__all__ = [
    "Affine",
    "Domain",
    "Term",
    "ConstructibleFunction",
    "ConstructibleParseError",
    "parse_constructible",
    "eval_constructible",
    "classify_nonneg",
    "NonNeg",
    "normal_form",
    "sup_over_domain",
    "Bounded",
    "Unbounded",
    "SupRefused",
    "MotivicSummand",
    "MotivicFunctionDesc",
    "eval_motivic",
    "GRID_Q",
    "GRID_S_MAX",
]

# sampling grid for counterexample search, in search order
GRID_Q = (Fraction(2), Fraction(3), Fraction(5), Fraction(3, 2))
GRID_S_MAX = 16


def _int_or_frac(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def _fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Affine:
    """``slope * s + const``; rational coefficients are allowed in exponents."""

    slope: int | Fraction = 0
    const: int | Fraction = 0

    def __post_init__(self):
        object.__setattr__(self, "slope", _int_or_frac(Fraction(self.slope)))
        object.__setattr__(self, "const", _int_or_frac(Fraction(self.const)))

    @property
    def is_integral(self) -> bool:
        return isinstance(self.slope, int) and isinstance(self.const, int)

    def __call__(self, s: int):
        return _int_or_frac(Fraction(self.slope) * s + self.const)

    def __str__(self) -> str:
        slope, const = Fraction(self.slope), Fraction(self.const)
        if slope == 0:
            return _fmt_rational(const)
        num, den = slope.numerator, slope.denominator
        head = {1: "s", -1: "-s"}.get(num, f"{num}s")
        if den != 1:
            head += f"/{den}"
        if const == 0:
            return head
        return head + ("-" if const < 0 else "+") + _fmt_rational(abs(const))


@dataclass(frozen=True)
class Domain:
    start: int = 0
    modulus: int = 1
    residue: int = 0

    def __post_init__(self):
        if self.modulus < 1 or not 0 <= self.residue < self.modulus:
            raise ValueError(f"bad progression: modulus {self.modulus}, residue {self.residue}")

    @property
    def first(self) -> int:
        return self.start + (self.residue - self.start) % self.modulus

    def contains(self, s: int) -> bool:
        return s >= self.start and s % self.modulus == self.residue

    def points(self, upto: int):
        s = self.first
        while s <= upto:
            yield s
            s += self.modulus

    def next_point(self, bound) -> int:
        """Least domain point >= bound."""
        b = max(math.ceil(bound), self.first)
        return b + (self.residue - b) % self.modulus

    def __str__(self) -> str:
        if self.modulus == 1:
            return f"s >= {self.start}"
        return f"s >= {self.start} mod {self.modulus} {self.residue}"


@dataclass(frozen=True)
class Term:
    coeff: Fraction = Fraction(1)
    alpha: Affine = Affine()
    betas: tuple[Affine, ...] = ()
    geom: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if any(a == 0 for a in self.geom):
            raise ValueError("geometric-series exponents must be nonzero")
        if not all(b.is_integral for b in self.betas):
            raise ValueError("factors in s must have integer coefficients")

    def value(self, q: Fraction, s: int) -> Fraction:
        v = self.coeff * q ** self.alpha(s)
        for b in self.betas:
            v *= b(s)
        for a in self.geom:
            v /= 1 - q**a
        return v

    def _body(self) -> list[str]:
        parts = []
        mag = abs(self.coeff)
        s_power = sum(1 for b in self.betas if b == Affine(1, 0))
        others = [b for b in self.betas if b != Affine(1, 0)]
        if mag != 1 or (s_power == 0 and not others and self.alpha == Affine() and not self.geom):
            parts.append(str(mag))
        if s_power:
            parts.append("s" if s_power == 1 else f"s^{s_power}")
        parts.extend(f"({b})" for b in others)
        if self.alpha != Affine():
            parts.append(f"q^({self.alpha})")
        if self.geom:
            parts.append(f"geom({','.join(map(str, self.geom))})")
        return parts


@dataclass(frozen=True)
class ConstructibleFunction:
    terms: tuple[Term, ...]
    domain: Domain = Domain()

    def __post_init__(self):
        d = self.domain
        for t in self.terms:
            # q-exponents must be integers at every domain point
            if (Fraction(t.alpha.slope) * d.modulus).denominator != 1 or not isinstance(t.alpha(d.first), int):
                raise ValueError(f"exponent {t.alpha} is not an integer on {d}")

    def __str__(self) -> str:
        out = ""
        for i, t in enumerate(self.terms):
            body = " * ".join(t._body())
            if i == 0:
                out = ("-" if t.coeff < 0 else "") + body
            else:
                out += (" - " if t.coeff < 0 else " + ") + body
        return f"{out or '0'} ; {self.domain}"


# ---------------------------------------------------------------- parsing

class ConstructibleParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos


_TOK = re.compile(r"\s*(?:(\d+)|(geom)|([sq])|([-+*/^(),]))")
_DOMAIN = re.compile(r"^\s*s\s*>=\s*(-?\d+)\s*(?:mod\s+(\d+)\s+(\d+))?\s*$")


def _tokens(text: str):
    pos, out = 0, []
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOK.match(text, pos)
        if m is None:
            raise ConstructibleParseError("unexpected character", text, pos)
        kind = m.lastindex
        out.append((("int", "geom", "sym", "op")[kind - 1], m.group(kind), m.start(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def pos(self):
        return self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)

    def take(self, expected=None):
        if self.i >= len(self.toks):
            raise ConstructibleParseError(f"expected {expected or 'more input'}", self.text, len(self.text))
        tok = self.toks[self.i]
        if expected is not None and tok[1] != expected:
            raise ConstructibleParseError(f"expected {expected!r}", self.text, tok[2])
        self.i += 1
        return tok

    def integer(self) -> int:
        sign = 1
        while self.peek() in ("+", "-"):
            sign *= -1 if self.take()[1] == "-" else 1
        kind, val, pos = self.take()
        if kind != "int":
            raise ConstructibleParseError("expected an integer", self.text, pos)
        return sign * int(val)

    def _over(self, n: int) -> Fraction:
        if self.peek() != "/":
            return Fraction(n)
        pos = self.take()[2]
        d = self.integer()
        if d <= 0:
            raise ConstructibleParseError("denominator must be positive", self.text, pos)
        return Fraction(n, d)

    def affine(self, closer: str) -> Affine:
        slope = const = 0
        seen = False
        while self.peek() != closer:
            sign = 1
            if self.peek() in ("+", "-"):
                sign = -1 if self.take()[1] == "-" else 1
            elif seen:
                raise ConstructibleParseError("expected '+' or '-'", self.text, self.pos())
            n = None
            if self.i < len(self.toks) and self.toks[self.i][0] == "int":
                n = int(self.take()[1])
            if self.peek() == "s":
                self.take()
                slope += sign * self._over(1 if n is None else n)
            elif n is not None:
                const += sign * self._over(n)
            else:
                raise ConstructibleParseError("expected an affine expression in s", self.text, self.pos())
            seen = True
        if not seen:
            raise ConstructibleParseError("empty affine expression", self.text, self.pos())
        return Affine(slope, const)

    def term(self, sign: int) -> Term:
        coeff = Fraction(sign)
        alpha = Affine()
        betas: list[Affine] = []
        geom: list[int] = []
        while True:
            kind, val, pos = self.take()
            if kind == "int":
                c = Fraction(int(val))
                if self.peek() == "/":
                    self.take()
                    c /= self.integer()
                coeff *= c
            elif val == "s":
                e = 1
                if self.peek() == "^":
                    self.take()
                    e = self.integer()
                    if e < 0:
                        raise ConstructibleParseError("negative power of s", self.text, pos)
                betas.extend([Affine(1, 0)] * e)
            elif val == "q":
                self.take("^")
                if self.peek() == "(":
                    self.take()
                    a = self.affine(")")
                    self.take(")")
                elif self.peek() == "s":
                    self.take()
                    a = Affine(1, 0)
                else:
                    a = Affine(0, self.integer())
                alpha = Affine(alpha.slope + a.slope, alpha.const + a.const)
            elif kind == "geom":
                self.take("(")
                geom.append(self.integer())
                while self.peek() == ",":
                    self.take()
                    geom.append(self.integer())
                self.take(")")
            elif val == "(":
                betas.append(self.affine(")"))
                self.take(")")
            else:
                raise ConstructibleParseError(f"unexpected {val!r}", self.text, pos)
            if self.peek() == "*":
                self.take()
                continue
            break
        try:
            return Term(coeff, alpha, tuple(betas), tuple(geom))
        except ValueError as exc:
            raise ConstructibleParseError(str(exc), self.text, pos) from None

    def function(self) -> list[Term]:
        terms = []
        first = True
        while self.i < len(self.toks):
            sign = 1
            if self.peek() in ("+", "-"):
                sign = -1 if self.take()[1] == "-" else 1
            elif not first:
                raise ConstructibleParseError("expected '+' or '-'", self.text, self.pos())
            first = False
            terms.append(self.term(sign))
        return terms


def parse_constructible(text: str) -> ConstructibleFunction:
    body, _, dom = text.partition(";")
    domain = Domain()
    if dom.strip():
        m = _DOMAIN.match(dom)
        if m is None:
            raise ConstructibleParseError("bad domain clause", text, len(body) + 1)
        start, r, c = m.groups()
        try:
            domain = Domain(int(start), int(r or 1), int(c or 0))
        except ValueError as exc:
            raise ConstructibleParseError(str(exc), text, len(body) + 1) from None
    if body.strip() == "0":
        return ConstructibleFunction((), domain)
    terms = _Parser(body).function()
    if not terms:
        raise ConstructibleParseError("empty function", text, 0)
    try:
        return ConstructibleFunction(tuple(t for t in terms if t.coeff != 0), domain)
    except ValueError as exc:
        raise ConstructibleParseError(str(exc), text, 0) from None


# ---------------------------------------------------------------- evaluation

def _as_q(q) -> Fraction:
    q = Fraction(q)
    if q <= 1:
        raise ValueError(f"q must exceed 1, got {q}")
    return q


def eval_constructible(f: ConstructibleFunction, q, s: int) -> Fraction:
    q = _as_q(q)
    if not f.domain.contains(s):
        raise ValueError(f"s={s} is outside the domain {f.domain}")
    return sum((t.value(q, s) for t in f.terms), Fraction(0))


@dataclass(frozen=True)
class NonNeg:
    answer: str  # "yes" | "unknown" | "counterexample"
    s: int | None = None
    q: Fraction | None = None
    value: Fraction | None = None


def _beta_sign(b: Affine, domain: Domain) -> int | None:
    """+1 if b >= 0 on the domain, -1 if b <= 0 there, None if it changes sign."""
    v0 = b(domain.first)
    if b.slope == 0:
        return 1 if v0 >= 0 else -1
    if b.slope > 0:
        return 1 if v0 >= 0 else None
    return -1 if v0 <= 0 else None


def _term_nonneg(t: Term, domain: Domain) -> bool:
    if t.coeff == 0:
        return True
    sign = 1 if t.coeff > 0 else -1
    for b in t.betas:
        bs = _beta_sign(b, domain)
        if bs is None:
            return False
        sign *= bs
    for a in t.geom:
        # 1 - q^a is negative exactly when a > 0
        if a > 0:
            sign = -sign
    return sign > 0


def classify_nonneg(f: ConstructibleFunction) -> NonNeg:
    if all(_term_nonneg(t, f.domain) for t in f.terms):
        return NonNeg("yes")
    for q in GRID_Q:
        for s in f.domain.points(GRID_S_MAX):
            v = eval_constructible(f, q, s)
            if v < 0:
                return NonNeg("counterexample", s, q, v)
    return NonNeg("unknown")


# ---------------------------------------------------------------- suprema

class SupRefused(ValueError):
    pass


def normal_form(f: ConstructibleFunction, q) -> list[tuple[Fraction, int, int]]:
    """Fold ``f`` at fixed ``q`` into ``sum c * s^a * q^(b s)``; returns (c, a, b) triples.

    Refuses when some beta factor is not a monomial in ``s``.
    """
    q = _as_q(q)
    acc: dict[tuple[int, int], Fraction] = {}
    for t in f.terms:
        if not isinstance(t.alpha.const, int):
            raise SupRefused(f"exponent {t.alpha} has a fractional constant")
        c = t.coeff * q**t.alpha.const
        a = 0
        for b in t.betas:
            if b.slope != 0 and b.const != 0:
                raise SupRefused(f"factor ({b}) is not a monomial in s")
            if b.slope:
                c *= b.slope
                a += 1
            else:
                c *= b.const
        for g in t.geom:
            c /= 1 - q**g
        key = (a, t.alpha.slope)
        acc[key] = acc.get(key, Fraction(0)) + c
    return sorted(((c, a, b) for (a, b), c in acc.items() if c != 0), key=lambda x: (x[1], x[2]))


@dataclass(frozen=True)
class Bounded:
    sup: Fraction
    argmax: int
    tail_bound: int


@dataclass(frozen=True)
class Unbounded:
    term: tuple[Fraction, int, int]
    witness_s: int
    threshold: Fraction


def _inv_log_upper(q: Fraction) -> Fraction:
    # 1/ln q <= (q+1) / (2(q-1)) for every q > 1
    return (q + 1) / (2 * (q - 1))


def _witness(term, q: Fraction, domain: Domain, threshold: Fraction) -> int:
    c, a, b = term

    def val(s):
        return c * Fraction(s) ** a * q ** int(b * s)

    # grow along domain indices, then bisect back to the first crossing
    step = 1
    hi = domain.first
    while val(hi) <= threshold:
        hi = domain.first + step * domain.modulus
        step *= 2
    lo_idx, hi_idx = 0, (hi - domain.first) // domain.modulus
    while lo_idx < hi_idx:
        mid = (lo_idx + hi_idx) // 2
        if val(domain.first + mid * domain.modulus) > threshold:
            hi_idx = mid
        else:
            lo_idx = mid + 1
    return domain.first + lo_idx * domain.modulus


def sup_over_domain(f: ConstructibleFunction, q, threshold=10**6) -> Bounded | Unbounded:
    """Exact supremum of a formally non-negative ``f`` over its domain at fixed ``q``."""
    q = _as_q(q)
    cls = classify_nonneg(f)
    if cls.answer != "yes":
        raise SupRefused(f"function is not certified non-negative ({cls.answer})")
    terms = normal_form(f, q)
    if any(c < 0 for c, _, _ in terms):
        raise SupRefused("normal form has a negative coefficient")
    for term in terms:
        c, a, b = term
        if b > 0 or (b == 0 and a > 0):
            return Unbounded(term, _witness(term, q, f.domain, Fraction(threshold)), Fraction(threshold))
    tail = Fraction(f.domain.first)
    for c, a, b in terms:
        if b < 0 and a > 0:
            # s^a q^(b s) is non-increasing once s >= a / (|b| ln q)
            tail = max(tail, Fraction(a, -b) * _inv_log_upper(q))
    s_bar = f.domain.next_point(tail)
    best, arg = None, None
    for s in f.domain.points(s_bar):
        v = eval_constructible(f, q, s)
        if best is None or v > best:
            best, arg = v, s
    return Bounded(best, arg, s_bar)


# ---------------------------------------------------------------- motivic

@dataclass(frozen=True)
class MotivicSummand:
    """``#Y(F_p; params) * f(s)``; ``parameters`` name variables of ``scheme`` fixed per call."""

    scheme: AffineScheme
    parameters: tuple[str, ...]
    factor: ConstructibleFunction

    def __post_init__(self):
        missing = [v for v in self.parameters if v not in self.scheme.variables]
        if missing:
            raise ValueError(f"parameters {missing} are not variables of {self.scheme.name}")


@dataclass(frozen=True)
class MotivicFunctionDesc:
    summands: tuple[MotivicSummand, ...]
    arity: int = 0

    def __post_init__(self):
        for sm in self.summands:
            if len(sm.parameters) != self.arity:
                raise ValueError(f"summand over {sm.scheme.name} has {len(sm.parameters)} parameter slots, expected {self.arity}")


def eval_motivic(F: MotivicFunctionDesc, p: int, parameters: Sequence[int] = (), s: int | None = None,
                 limits: Limits = DEFAULT_LIMITS) -> Fraction:
    limits.check_prime(p)
    if len(parameters) != F.arity:
        raise ValueError(f"expected {F.arity} parameters, got {len(parameters)}")
    total = Fraction(0)
    for sm in F.summands:
        values = {name: int(v) % p for name, v in zip(sm.parameters, parameters)}
        free = tuple(v for v in sm.scheme.variables if v not in values)
        eqs = tuple(e.substitute(values).with_variables(free) for e in sm.scheme.equations)
        fiber = AffineScheme(f"{sm.scheme.name}{tuple(parameters)}", free, eqs, 0)
        n = count_points(fiber, p, 1, limits=limits).count
        point = sm.factor.domain.first if s is None else s
        total += n * eval_constructible(sm.factor, p, point)
    return total
