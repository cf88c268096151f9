"""Scheme and morphism definition files.

Line-oriented ``key = value`` text grouped into bracketed sections::

    # the sum-of-squares map from 3-space to the line
    [scheme A3]
    vars = x, y, z
    dim = 3
    ci = yes

    [scheme A1]
    vars = t
    dim = 1
    ci = yes

    [morphism q3]
    source = A3
    target = A1
    maps = x^2 + y^2 + z^2

Scheme keys: ``vars`` (comma list, required), ``eqs`` (semicolon list of
polynomials, optional), ``dim`` (required), ``ci`` (yes/no, default no).
Morphism keys: ``source``, ``target``, ``maps`` (semicolon list, one per
target variable).  Unknown keys, duplicate keys and duplicate names are
errors.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .polyring import PolyParseError, parse_poly
from .schemes import AffineScheme, PolyMorphism, SchemeError

__all__ = ["DefinitionError", "Definitions", "parse_definitions", "load_definitions", "dump_definitions"]

_SECTION = re.compile(r"^\[\s*(scheme|morphism)\s+([A-Za-z_][A-Za-z0-9_]*)\s*\]$")
_KEYS = {
    "scheme": {"vars", "eqs", "dim", "ci"},
    "morphism": {"source", "target", "maps"},
}
_REQUIRED = {"scheme": {"vars", "dim"}, "morphism": {"source", "target", "maps"}}


class DefinitionError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<text>"):
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.line = line


@dataclass
class Definitions:
    schemes: dict[str, AffineScheme] = field(default_factory=dict)
    morphisms: dict[str, PolyMorphism] = field(default_factory=dict)


def _split(value: str, sep: str) -> list[str]:
    return [part.strip() for part in value.split(sep) if part.strip()]


def parse_definitions(text: str, source: str = "<text>") -> Definitions:
    sections: list[tuple[str, str, int, dict[str, tuple[str, int]]]] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            m = _SECTION.match(line)
            if m is None:
                raise DefinitionError(f"bad section header {line!r}", lineno, source)
            current = (m.group(1), m.group(2), lineno, {})
            sections.append(current)
            continue
        if current is None:
            raise DefinitionError("key outside of a section", lineno, source)
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq:
            raise DefinitionError(f"expected 'key = value', got {line!r}", lineno, source)
        kind, name, _, entries = current
        if key not in _KEYS[kind]:
            raise DefinitionError(f"unknown key {key!r} in {kind} {name}", lineno, source)
        if key in entries:
            raise DefinitionError(f"duplicate key {key!r} in {kind} {name}", lineno, source)
        entries[key] = (value.strip(), lineno)

    defs = Definitions()
    names: set[str] = set()
    for kind, name, lineno, entries in sections:
        if name in names:
            raise DefinitionError(f"duplicate name {name!r}", lineno, source)
        names.add(name)
        missing = _REQUIRED[kind] - entries.keys()
        if missing:
            raise DefinitionError(f"{kind} {name} is missing {sorted(missing)}", lineno, source)

    for kind, name, lineno, entries in sections:
        if kind != "scheme":
            continue
        variables = _split(entries["vars"][0], ",")
        eqs = []
        if "eqs" in entries:
            text_eqs, at = entries["eqs"]
            for e in _split(text_eqs, ";"):
                try:
                    eqs.append(parse_poly(e, variables))
                except PolyParseError as exc:
                    raise DefinitionError(str(exc), at, source) from None
        dim_text, at = entries["dim"]
        if not dim_text.isdigit():
            raise DefinitionError(f"dim must be a natural number, got {dim_text!r}", at, source)
        ci = False
        if "ci" in entries:
            ci_text, at_ci = entries["ci"]
            if ci_text not in ("yes", "no"):
                raise DefinitionError(f"ci must be yes or no, got {ci_text!r}", at_ci, source)
            ci = ci_text == "yes"
        try:
            defs.schemes[name] = AffineScheme(name, tuple(variables), tuple(eqs), int(dim_text), ci)
        except (SchemeError, ValueError) as exc:
            raise DefinitionError(str(exc), lineno, source) from None

    for kind, name, lineno, entries in sections:
        if kind != "morphism":
            continue
        refs = {}
        for key in ("source", "target"):
            ref, at = entries[key]
            if ref not in defs.schemes:
                raise DefinitionError(f"{key} {ref!r} is not a defined scheme", at, source)
            refs[key] = defs.schemes[ref]
        maps_text, at = entries["maps"]
        comps = []
        for e in _split(maps_text, ";"):
            try:
                comps.append(parse_poly(e, refs["source"].variables))
            except PolyParseError as exc:
                raise DefinitionError(str(exc), at, source) from None
        try:
            defs.morphisms[name] = PolyMorphism(name, refs["source"], refs["target"], tuple(comps))
        except SchemeError as exc:
            raise DefinitionError(str(exc), lineno, source) from None
    return defs


def load_definitions(path: str | Path) -> Definitions:
    path = Path(path)
    return parse_definitions(path.read_text(), source=str(path))


def dump_definitions(defs: Definitions) -> str:
    """Canonical text that parses back to the same definitions."""
    out = []
    for s in defs.schemes.values():
        out.append(f"[scheme {s.name}]")
        out.append(f"vars = {', '.join(s.variables)}")
        if s.equations:
            out.append(f"eqs = {' ; '.join(str(e) for e in s.equations)}")
        out.append(f"dim = {s.declared_dim}")
        out.append(f"ci = {'yes' if s.ci else 'no'}")
        out.append("")
    for m in defs.morphisms.values():
        out.append(f"[morphism {m.name}]")
        out.append(f"source = {m.source.name}")
        out.append(f"target = {m.target.name}")
        out.append(f"maps = {' ; '.join(str(c) for c in m.components)}")
        out.append("")
    return "\n".join(out)
