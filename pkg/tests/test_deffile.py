from pathlib import Path

import pytest

from jetcount.deffile import DefinitionError, dump_definitions, load_definitions, parse_definitions

DATA = Path(__file__).resolve().parent.parent / "demos" / "data" / "examples.txt"

GOOD = """
# comment line
[scheme A2]
vars = x, y
dim = 2
ci = yes

[scheme C]
vars = u, v
eqs = u^2 + v^2 - 1
dim = 1
ci = yes

[morphism f]
source = A2
target = C
maps = x^2 - y^2 + 1 ; 2*x*y   # trailing comment
"""


def test_parse_and_dump_roundtrip():
    defs = parse_definitions(GOOD)
    assert set(defs.schemes) == {"A2", "C"}
    f = defs.morphisms["f"]
    assert [str(c) for c in f.components] == ["x^2 - y^2 + 1", "2*x*y"]
    again = parse_definitions(dump_definitions(defs))
    assert again.schemes == defs.schemes and again.morphisms == defs.morphisms


def test_demo_data_file_loads():
    defs = load_definitions(DATA)
    assert "q3" in defs.morphisms and "cusp_line" in defs.schemes


@pytest.mark.parametrize("text,line,fragment", [
    ("vars = x", 1, "outside"),
    ("[scheme A]\nvars = x\nvars = y\ndim = 1", 3, "duplicate key"),
    ("[scheme A]\nvars = x\ncolour = red\ndim = 1", 3, "unknown key"),
    ("[scheme A]\nvars = x\ndim = 1\n[scheme A]\nvars = y\ndim = 1", 4, "duplicate name"),
    ("[scheme A]\nvars = x", 1, "missing"),
    ("[scheme A]\nvars = x\neqs = x +\ndim = 0", 3, "position"),
    ("[scheme A]\nvars = x\ndim = one", 3, "natural number"),
    ("[scheme A]\nvars = x\ndim = 1\nci = maybe", 4, "yes or no"),
    ("[morphism f]\nsource = A\ntarget = B\nmaps = x", 2, "not a defined scheme"),
    ("[thing A]", 1, "section header"),
    ("[scheme A]\nvars x", 2, "key = value"),
])
def test_errors_name_the_line(text, line, fragment):
    with pytest.raises(DefinitionError) as err:
        parse_definitions(text, source="defs.txt")
    assert err.value.line == line
    assert f"defs.txt:{line}:" in str(err.value) and fragment in str(err.value)
