"""Affine schemes, polynomial morphisms and their jet prolongations."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Sequence

from .limits import DEFAULT_LIMITS, Limits
from .linalg import rank_mod_p
from .polyring import (
    IntPoly,
    eval_int,
    jet_coefficients,
    jet_variables,
    parse_poly,
    partial_derivative,
)

__all__ = [
    "AffineScheme",
    "PolyMorphism",
    "JetSystem",
    "SchemeError",
    "jet_prolong",
    "jet_morphism",
    "jacobian",
    "is_singular_point",
    "singular_reduction_set",
    "check_morphism",
    "affine_space",
]


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class AffineScheme:
    """Subscheme of affine m-space cut out by integer polynomials.

    ``ci`` flags the presentation as a complete intersection, meaning the
    number of equations equals ``m - declared_dim``.
    """

    name: str
    variables: tuple[str, ...]
    equations: tuple[IntPoly, ...]
    declared_dim: int
    ci: bool = False

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if len(set(variables)) != len(variables):
            raise SchemeError(f"scheme {self.name}: duplicate variable names in {variables}")
        eqs = []
        for f in self.equations:
            if isinstance(f, str):
                f = parse_poly(f, variables)
            try:
                eqs.append(f.with_variables(variables))
            except ValueError as exc:
                raise SchemeError(f"scheme {self.name}: {exc}") from None
        object.__setattr__(self, "equations", tuple(eqs))
        if not 0 <= self.declared_dim <= len(variables):
            raise SchemeError(f"scheme {self.name}: declared_dim {self.declared_dim} not in [0, {len(variables)}]")
        if self.ci and len(eqs) != len(variables) - self.declared_dim:
            raise SchemeError(
                f"scheme {self.name}: complete intersection needs {len(variables) - self.declared_dim} "
                f"equations, got {len(eqs)}"
            )

    @classmethod
    def from_text(cls, name: str, variables: Sequence[str], equations: Sequence[str], dim: int, ci: bool = False):
        return cls(name, tuple(variables), tuple(parse_poly(e, variables) for e in equations), dim, ci)

    @property
    def ambient_dim(self) -> int:
        return len(self.variables)

    @property
    def codim(self) -> int:
        return len(self.variables) - self.declared_dim

    def contains(self, point: Sequence[int], modulus: int) -> bool:
        return all(eval_int(f, point) % modulus == 0 for f in self.equations)

    def product(self, other: "AffineScheme", name: str | None = None) -> "AffineScheme":
        """Product with a scheme in disjoint variables."""
        if set(self.variables) & set(other.variables):
            raise SchemeError("product needs disjoint variable sets")
        variables = self.variables + other.variables
        eqs = tuple(f.with_variables(variables) for f in self.equations + other.equations)
        return AffineScheme(
            name or f"{self.name}x{other.name}",
            variables,
            eqs,
            self.declared_dim + other.declared_dim,
            self.ci and other.ci,
        )


def affine_space(variables: Sequence[str], name: str | None = None) -> AffineScheme:
    variables = tuple(variables)
    return AffineScheme(name or f"A{len(variables)}", variables, (), len(variables), ci=True)


@dataclass(frozen=True)
class PolyMorphism:
    name: str
    source: AffineScheme
    target: AffineScheme
    components: tuple[IntPoly, ...]

    def __post_init__(self):
        comps = []
        for f in self.components:
            if isinstance(f, str):
                f = parse_poly(f, self.source.variables)
            try:
                comps.append(f.with_variables(self.source.variables))
            except ValueError as exc:
                raise SchemeError(f"morphism {self.name}: {exc}") from None
        object.__setattr__(self, "components", tuple(comps))
        if len(comps) != self.target.ambient_dim:
            raise SchemeError(
                f"morphism {self.name}: {len(comps)} components for a target in "
                f"{self.target.ambient_dim}-space"
            )

    @property
    def relative_dim(self) -> int:
        return self.source.declared_dim - self.target.declared_dim

    def image(self, point: Sequence[int]) -> tuple[int, ...]:
        return tuple(eval_int(f, point) for f in self.components)

    def fiber_scheme(self, y: Sequence[int], name: str | None = None) -> AffineScheme:
        """Source equations plus ``components - y`` (integer representatives)."""
        if len(y) != len(self.components):
            raise SchemeError(f"target point {tuple(y)} has wrong length")
        eqs = self.source.equations + tuple(c - int(v) for c, v in zip(self.components, y))
        dim = self.source.ambient_dim - len(eqs)
        # the augmented system is a complete intersection only over an affine-space target
        ci = self.source.ci and not self.target.equations and dim >= 0
        return AffineScheme(
            name or f"{self.name}^-1{tuple(y)}", self.source.variables, eqs, max(dim, 0), ci
        )


@dataclass(frozen=True)
class JetSystem:
    level: int
    scheme: AffineScheme
    morphism: PolyMorphism | None = None


def _jet_equations(equations: Sequence[IntPoly], k: int) -> tuple[IntPoly, ...]:
    per_eq = [jet_coefficients(f, k) for f in equations]
    # level-major: all level-0 equations first, then level 1, ...
    return tuple(per_eq[j][u] for u in range(k + 1) for j in range(len(equations)))


def jet_prolong(X: AffineScheme, k: int) -> JetSystem:
    if k < 0:
        raise ValueError("jet level must be non-negative")
    if k == 0:
        return JetSystem(0, X)
    jvars = jet_variables(X.variables, k)
    eqs = tuple(f.with_variables(jvars) for f in _jet_equations(X.equations, k))
    J = AffineScheme(f"J{k}({X.name})", jvars, eqs, (k + 1) * X.declared_dim, X.ci)
    return JetSystem(k, J)


def jet_morphism(phi: PolyMorphism, k: int) -> JetSystem:
    if k < 0:
        raise ValueError("jet level must be non-negative")
    if k == 0:
        return JetSystem(0, phi.source, phi)
    src = jet_prolong(phi.source, k).scheme
    tgt = jet_prolong(phi.target, k).scheme
    # components follow the target's jet coordinates: target variable, then level
    comps = tuple(
        c.with_variables(src.variables) for f in phi.components for c in jet_coefficients(f, k)
    )
    return JetSystem(k, src, PolyMorphism(f"J{k}({phi.name})", src, tgt, comps))


# ---------------------------------------------------------------- smooth locus

@lru_cache(maxsize=256)
def _jacobian_polys(phi: PolyMorphism) -> tuple[tuple[IntPoly, ...], ...]:
    rows = phi.source.equations + phi.components
    return tuple(tuple(partial_derivative(f, v) for v in phi.source.variables) for f in rows)


def jacobian(phi: PolyMorphism) -> tuple[tuple[IntPoly, ...], ...]:
    """Rows: source equations, then morphism components; columns: source variables."""
    return _jacobian_polys(phi)


def _require_ci(phi: PolyMorphism) -> None:
    if not phi.source.ci:
        raise SchemeError(
            f"morphism {phi.name}: source {phi.source.name} is not flagged as a complete "
            "intersection; the Jacobian criterion is refused"
        )


def is_singular_point(phi: PolyMorphism, point: Sequence[int], p: int) -> bool:
    """True when ``phi`` is not smooth at the F_p point ``point``."""
    _require_ci(phi)
    point = tuple(int(x) % p for x in point)
    if len(point) != phi.source.ambient_dim:
        raise SchemeError(f"point {point} has wrong length for {phi.source.name}")
    if not phi.source.contains(point, p):
        raise SchemeError(f"point {point} is not on {phi.source.name} mod {p}")
    return _singular_at(phi, point, p)


def _singular_at(phi: PolyMorphism, point: tuple[int, ...], p: int) -> bool:
    rows = _jacobian_polys(phi)
    matrix = [[eval_int(d, point) % p for d in row] for row in rows]
    full = phi.source.codim + phi.target.declared_dim
    return rank_mod_p(matrix, p) < full


@lru_cache(maxsize=256)
def _singular_set(phi: PolyMorphism, p: int) -> frozenset[tuple[int, ...]]:
    out = set()
    for point in product(range(p), repeat=phi.source.ambient_dim):
        if phi.source.contains(point, p) and _singular_at(phi, point, p):
            out.add(point)
    return frozenset(out)


def singular_reduction_set(phi: PolyMorphism, p: int, limits: Limits = DEFAULT_LIMITS) -> frozenset[tuple[int, ...]]:
    """All F_p points of the source where ``phi`` is not smooth."""
    _require_ci(phi)
    limits.check_prime(p)
    limits.require(f"singular locus of {phi.name} over F_{p}", p ** phi.source.ambient_dim)
    return _singular_set(phi, p)


def check_morphism(phi: PolyMorphism, p: int, samples: int = 200, seed: int = 0) -> list[tuple[int, ...]]:
    """Sample F_p points of the source and return those whose image misses the target.

    Small sources are enumerated exhaustively; an empty list means no
    violation was found.
    """
    if not phi.target.equations:
        return []
    m = phi.source.ambient_dim
    if p**m <= 4 * samples:
        candidates = product(range(p), repeat=m)
    else:
        rng = random.Random(f"{seed}:{p}:{phi.name}")
        candidates = (tuple(rng.randrange(p) for _ in range(m)) for _ in range(50 * samples))
    bad = []
    seen = 0
    for x in candidates:
        if not phi.source.contains(x, p):
            continue
        seen += 1
        if not phi.target.contains(phi.image(x), p):
            bad.append(x)
        if seen >= samples:
            break
    return bad
