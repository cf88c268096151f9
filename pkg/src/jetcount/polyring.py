"""Sparse multivariate polynomials with integer coefficients.

Polynomials are immutable.  Terms are kept in a dict keyed by exponent
tuples; printing walks them in graded reverse-lexicographic order so that
two equal polynomials always print the same string.

Jet variables are ordinary variables whose names carry a level suffix,
``x1^(2)`` for the level-2 jet of ``x1``.  Level 0 is the bare name.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

__all__ = [
    "IntPoly",
    "ResidueElement",
    "TruncatedSeries",
    "PolyParseError",
    "parse_poly",
    "eval_mod",
    "eval_int",
    "jet_name",
    "split_jet_name",
    "jet_variables",
    "jet_coefficient",
    "jet_coefficients",
    "partial_derivative",
    "MAX_EXPONENT",
]

MAX_EXPONENT = 1 << 16

_NAME = r"[A-Za-z][A-Za-z0-9_]*"
_JET_RE = re.compile(rf"^({_NAME})(?:\^?\((\d+)\))?$")


class PolyParseError(ValueError):
    """Raised for malformed polynomial text; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def jet_name(name: str, level: int) -> str:
    if level < 0:
        raise ValueError("jet level must be non-negative")
    return name if level == 0 else f"{name}^({level})"


def split_jet_name(name: str) -> tuple[str, int]:
    """Inverse of :func:`jet_name`; accepts both ``x(1)`` and ``x^(1)``."""
    m = _JET_RE.match(name)
    if m is None:
        raise ValueError(f"not a variable name: {name!r}")
    return m.group(1), int(m.group(2) or 0)


def jet_variables(variables: Sequence[str], k: int) -> tuple[str, ...]:
    """Variable-major jet variable list: ``x, x^(1), .., x^(k), y, y^(1), ..``."""
    return tuple(jet_name(v, j) for v in variables for j in range(k + 1))


def _grevlex_key(exps: tuple[int, ...]):
    # sorting ascending on this key gives grevlex-descending order
    return (-sum(exps), tuple(exps[::-1]))


class IntPoly:
    """Polynomial over the integers in a fixed ordered variable set."""

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], int] | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        n = len(self.variables)
        clean: dict[tuple[int, ...], int] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not match {n} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = int(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if clean[exps] == 0:
                    del clean[exps]
        self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, variables: Sequence[str]) -> "IntPoly":
        return cls(variables)

    @classmethod
    def constant(cls, c: int, variables: Sequence[str]) -> "IntPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "IntPoly":
        variables = tuple(variables)
        exps = [0] * len(variables)
        exps[variables.index(name)] = 1
        return cls(variables, {tuple(exps): 1})

    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        return dict(self._terms)

    def items(self):
        """Terms in canonical (grevlex-descending) order."""
        return sorted(self._terms.items(), key=lambda t: _grevlex_key(t[0]))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def used_variables(self) -> tuple[str, ...]:
        used = set()
        for exps in self._terms:
            used.update(i for i, e in enumerate(exps) if e)
        return tuple(v for i, v in enumerate(self.variables) if i in used)

    def constant_term(self) -> int:
        return self._terms.get((0,) * len(self.variables), 0)

    # arithmetic
    def _coerce(self, other) -> "IntPoly":
        if isinstance(other, IntPoly):
            if other.variables != self.variables:
                raise ValueError(
                    f"variable sets differ: {self.variables} vs {other.variables}; use with_variables()"
                )
            return other
        if isinstance(other, int):
            return IntPoly.constant(other, self.variables)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return IntPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return IntPoly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = IntPoly.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.constant(other, self.variables)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.variables == other.variables and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # variable management
    def with_variables(self, variables: Sequence[str]) -> "IntPoly":
        """Re-embed into another variable list containing every used variable."""
        variables = tuple(variables)
        index = {v: i for i, v in enumerate(variables)}
        for v in self.used_variables():
            if v not in index:
                raise ValueError(f"variable {v!r} missing from target variable set")
        out = {}
        for exps, c in self._terms.items():
            new = [0] * len(variables)
            for i, e in enumerate(exps):
                if e:
                    new[index[self.variables[i]]] = e
            out[tuple(new)] = c
        return IntPoly(variables, out)

    def rename(self, mapping: Mapping[str, str]) -> "IntPoly":
        return IntPoly([mapping.get(v, v) for v in self.variables], self._terms)

    def substitute(self, values: Mapping[str, int]) -> "IntPoly":
        """Plug integers in for some variables; they are dropped from the set."""
        keep = [i for i, v in enumerate(self.variables) if v not in values]
        fixed = [(i, int(values[v])) for i, v in enumerate(self.variables) if v in values]
        out: dict[tuple[int, ...], int] = {}
        for exps, c in self._terms.items():
            for i, a in fixed:
                c *= a ** exps[i]
            e = tuple(exps[i] for i in keep)
            out[e] = out.get(e, 0) + c
        return IntPoly([self.variables[i] for i in keep], out)

    # printing
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.items():
            factors = []
            for v, e in zip(self.variables, exps):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            parts.append((c < 0, body))
        neg, body = parts[0]
        out = ("-" if neg else "") + body
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self) -> str:
        return f"IntPoly({str(self)!r}, variables={self.variables})"


@dataclass(frozen=True)
class ResidueElement:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be a prime power >= 2")
        object.__setattr__(self, "value", self.value % self.modulus)

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class TruncatedSeries:
    """Element of F_p[t]/(t^e), constant term first."""

    coefficients: tuple[int, ...]
    p: int

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("truncation length must be at least 1")
        object.__setattr__(self, "coefficients", tuple(c % self.p for c in self.coefficients))

    @property
    def e(self) -> int:
        return len(self.coefficients)

    def _check(self, other: "TruncatedSeries"):
        if other.p != self.p or other.e != self.e:
            raise ValueError("series live in different rings")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)), self.p)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        e, a, b = self.e, self.coefficients, other.coefficients
        out = [0] * e
        for i in range(e):
            if a[i]:
                for j in range(e - i):
                    out[i + j] += a[i] * b[j]
        return TruncatedSeries(tuple(out), self.p)

    def is_zero(self) -> bool:
        return not any(self.coefficients)


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    rf"\s*(?:(?P<int>\d+)|(?P<var>{_NAME}(?:\^?\(\d+\))?)|(?P<op>[-+*^]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise PolyParseError("unexpected character", text, pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    return tokens


def parse_poly(text: str, variables: Sequence[str]) -> IntPoly:
    """Parse ``text`` as an integer polynomial in ``variables``.

    Jet variables may be written ``x(1)`` or ``x^(1)``; both name the same
    variable, stored as ``x^(1)``.

    >>> str(parse_poly("x*y^2 + 3 - x", ["x", "y"]))
    'x*y^2 - x + 3'
    """
    variables = tuple(variables)
    canon = {}
    for v in variables:
        base, level = split_jet_name(v)
        canon[jet_name(base, level)] = v
    tokens = _tokenize(text)
    n = len(variables)
    if not tokens:
        raise PolyParseError("empty polynomial", text, 0)

    out: dict[tuple[int, ...], int] = {}
    i = 0

    def expect_factor(i):
        if i >= len(tokens):
            raise PolyParseError("expected a factor", text, len(text))
        kind, val, pos = tokens[i]
        if kind == "int":
            return ("const", int(val)), i + 1
        if kind == "var":
            base, level = split_jet_name(val)
            key = jet_name(base, level)
            if key not in canon:
                raise PolyParseError(f"unknown variable {val!r}", text, pos)
            idx = variables.index(canon[key])
            e = 1
            if i + 1 < len(tokens) and tokens[i + 1][1] == "^":
                if i + 2 >= len(tokens) or tokens[i + 2][0] != "int":
                    where = tokens[i + 2][2] if i + 2 < len(tokens) else len(text)
                    raise PolyParseError("expected natural exponent after '^'", text, where)
                e = int(tokens[i + 2][1])
                if e > MAX_EXPONENT:
                    raise PolyParseError(f"exponent {e} exceeds {MAX_EXPONENT}", text, tokens[i + 2][2])
                i += 2
            return ("var", idx, e), i + 1
        raise PolyParseError(f"unexpected {val!r}", text, pos)

    first = True
    while i < len(tokens):
        sign = 1
        kind, val, pos = tokens[i]
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
        elif not first:
            raise PolyParseError("expected '+' or '-' between terms", text, pos)
        first = False
        coeff = sign
        exps = [0] * n
        factor, i = expect_factor(i)
        while True:
            if factor[0] == "const":
                coeff *= factor[1]
            else:
                _, idx, e = factor
                exps[idx] += e
                if exps[idx] > MAX_EXPONENT:
                    raise PolyParseError("exponent overflow", text, tokens[i - 1][2])
            if i < len(tokens) and tokens[i][1] == "*":
                factor, i = expect_factor(i + 1)
            else:
                break
        if i < len(tokens) and tokens[i][0] != "op":
            raise PolyParseError("missing operator", text, tokens[i][2])
        if i < len(tokens) and tokens[i][1] == "^":
            raise PolyParseError("'^' must follow a variable", text, tokens[i][2])
        key = tuple(exps)
        out[key] = out.get(key, 0) + coeff
    return IntPoly(variables, out)


# ---------------------------------------------------------------- evaluation

def eval_int(f: IntPoly, point: Sequence[int]) -> int:
    """Exact evaluation over the integers."""
    if len(point) != len(f.variables):
        raise ValueError(f"point has {len(point)} entries, polynomial has {len(f.variables)} variables")
    total = 0
    for exps, c in f._terms.items():
        term = c
        for x, e in zip(point, exps):
            if e:
                term *= x ** e
        total += term
    return total


def eval_mod(f: IntPoly, point: Sequence[ResidueElement | int], modulus: int) -> ResidueElement:
    """Evaluate ``f`` at ``point`` in Z/modulus, reducing after every product."""
    if len(point) != len(f.variables):
        raise ValueError(f"point has {len(point)} entries, polynomial has {len(f.variables)} variables")
    values = []
    for x in point:
        if isinstance(x, ResidueElement):
            if x.modulus != modulus:
                raise ValueError(f"modulus mismatch: {x.modulus} != {modulus}")
            values.append(x.value)
        else:
            values.append(int(x) % modulus)
    total = 0
    for exps, c in f._terms.items():
        term = c % modulus
        for x, e in zip(values, exps):
            if e:
                term = term * pow(x, e, modulus) % modulus
        total = (total + term) % modulus
    return ResidueElement(total, modulus)


# ---------------------------------------------------------------- derivatives

def partial_derivative(f: IntPoly, variable: str) -> IntPoly:
    if variable not in f.variables:
        raise ValueError(f"unknown variable {variable!r}")
    i = f.variables.index(variable)
    out = {}
    for exps, c in f._terms.items():
        e = exps[i]
        if e:
            new = list(exps)
            new[i] = e - 1
            out[tuple(new)] = c * e
    return IntPoly(f.variables, out)


def _series_mul(a: list[IntPoly], b: list[IntPoly], zero: IntPoly) -> list[IntPoly]:
    n = len(a)
    out = [zero] * n
    for i in range(n):
        if a[i].is_zero():
            continue
        for j in range(n - i):
            if not b[j].is_zero():
                out[i + j] = out[i + j] + a[i] * b[j]
    return out


def jet_coefficients(f: IntPoly, k: int) -> list[IntPoly]:
    """All jet coefficients ``[f^(0), ..., f^(k)]`` in the jet variables of depth ``k``.

    ``f^(u)`` is the raw coefficient of ``t^u`` after substituting
    ``x -> x + x^(1) t + ... + x^(k) t^k``; no factorials are divided out.
    """
    if k < 0:
        raise ValueError("jet depth must be non-negative")
    jvars = jet_variables(f.variables, k)
    m = len(f.variables)
    zero = IntPoly.zero(jvars)
    one = IntPoly.constant(1, jvars)
    # series for each source variable: coefficient of t^j is x_i^(j)
    series = [[IntPoly.var(jvars[i * (k + 1) + j], jvars) for j in range(k + 1)] for i in range(m)]
    power_cache: dict[tuple[int, int], list[IntPoly]] = {}

    def power(i: int, e: int) -> list[IntPoly]:
        key = (i, e)
        if key not in power_cache:
            if e == 0:
                power_cache[key] = [one] + [zero] * k
            else:
                power_cache[key] = _series_mul(power(i, e - 1), series[i], zero)
        return power_cache[key]

    total = [zero] * (k + 1)
    for exps, c in f._terms.items():
        acc = [IntPoly.constant(c, jvars)] + [zero] * k
        for i, e in enumerate(exps):
            if e:
                acc = _series_mul(acc, power(i, e), zero)
        total = [a + b for a, b in zip(total, acc)]
    return total


def jet_coefficient(f: IntPoly, u: int, k: int) -> IntPoly:
    if u < 0 or u > k:
        raise ValueError(f"jet index u={u} must satisfy 0 <= u <= k={k}")
    return jet_coefficients(f, k)[u]


def monomials(variables: Sequence[str], max_degree: int) -> Iterable[tuple[int, ...]]:
    """Exponent vectors of total degree at most ``max_degree``."""
    for exps in product(range(max_degree + 1), repeat=len(variables)):
        if sum(exps) <= max_degree:
            yield exps
