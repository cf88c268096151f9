from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from jetcount.polyring import (
    IntPoly,
    PolyParseError,
    ResidueElement,
    TruncatedSeries,
    eval_int,
    eval_mod,
    jet_coefficient,
    jet_coefficients,
    jet_name,
    jet_variables,
    parse_poly,
    partial_derivative,
    split_jet_name,
)

XYZ = ("x", "y", "z")


def to_sympy(f: IntPoly):
    syms = sympy.symbols(f.variables)
    if len(f.variables) == 1:
        syms = (syms,) if not isinstance(syms, tuple) else syms
    return sum((c * sympy.Mul(*[s**e for s, e in zip(syms, exps)]) for exps, c in f.items()), sympy.Integer(0))


def from_sympy(expr, variables):
    poly = sympy.Poly(sympy.expand(expr), *sympy.symbols(variables))
    return IntPoly(variables, {tuple(m): int(c) for m, c in poly.terms()})


polys = st.dictionaries(
    st.tuples(*[st.integers(0, 3)] * 3), st.integers(-5, 5), max_size=5
).map(lambda d: IntPoly(XYZ, d))


# ---------------------------------------------------------------- printing and parsing

def test_canonical_string_uses_grevlex_order():
    f = parse_poly("3 - x + x*y^2", XYZ)
    assert str(f) == "x*y^2 - x + 3"
    assert str(IntPoly.zero(XYZ)) == "0"
    assert str(parse_poly("-2*x^2*z + y^3", XYZ)) == "y^3 - 2*x^2*z"


def test_parse_accepts_both_jet_spellings():
    vs = jet_variables(["x1"], 1)
    assert parse_poly("x1^(1)", vs) == parse_poly("x1(1)", vs)


@pytest.mark.parametrize("text,pos", [("x +", 3), ("x ** 2", 3), ("w", 0), ("x^", 2), ("2 3", 2)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(PolyParseError) as err:
        parse_poly(text, XYZ)
    assert err.value.pos == pos


def test_parse_rejects_huge_exponent():
    with pytest.raises(PolyParseError):
        parse_poly("x^100000", XYZ)


@given(polys)
@settings(max_examples=100, deadline=None)
def test_print_parse_roundtrip(f):
    assert parse_poly(str(f), XYZ) == f


# ---------------------------------------------------------------- arithmetic against sympy

@given(polys, polys)
@settings(max_examples=60, deadline=None)
def test_arithmetic_matches_sympy(f, g):
    assert from_sympy(to_sympy(f) * to_sympy(g), XYZ) == f * g
    assert from_sympy(to_sympy(f) - to_sympy(g), XYZ) == f - g


@given(polys, polys, polys)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(f, g, h):
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert f + g == g + f
    assert f - f == IntPoly.zero(XYZ)


@given(polys, st.tuples(*[st.integers(-20, 20)] * 3), st.sampled_from([9, 25, 27, 7]))
@settings(max_examples=80, deadline=None)
def test_eval_mod_agrees_with_integer_evaluation(f, x, n):
    assert eval_mod(f, x, n).value == eval_int(f, x) % n


def test_eval_mod_rejects_mismatched_residues():
    f = parse_poly("x", ("x",))
    with pytest.raises(ValueError):
        eval_mod(f, [ResidueElement(1, 9)], 27)


def test_partial_derivative():
    f = parse_poly("x^3*y + 2*y", XYZ)
    assert partial_derivative(f, "x") == parse_poly("3*x^2*y", XYZ)
    assert partial_derivative(f, "z").is_zero()


def test_substitute_drops_variables():
    f = parse_poly("x*y + z", XYZ)
    g = f.substitute({"y": 2})
    assert g.variables == ("x", "z")
    assert str(g) == "2*x + z"


def test_truncated_series_ring():
    a = TruncatedSeries((1, 1, 0), 3)
    b = TruncatedSeries((2, 0, 1), 3)
    assert (a * b).coefficients == (2, 2, 1)
    assert (a + b).coefficients == (0, 1, 1)
    with pytest.raises(ValueError):
        a * TruncatedSeries((1, 0), 3)


# ---------------------------------------------------------------- jets

def test_jet_names():
    assert jet_name("x", 0) == "x"
    assert jet_name("x", 2) == "x^(2)"
    assert split_jet_name("x2^(3)") == ("x2", 3)
    assert split_jet_name("x2(3)") == ("x2", 3)
    assert jet_variables(["a", "b"], 1) == ("a", "a^(1)", "b", "b^(1)")


def sympy_jets(f: IntPoly, k: int):
    t = sympy.Symbol("t")
    jv = jet_variables(f.variables, k)
    subs = {}
    for v in f.variables:
        subs[sympy.Symbol(v)] = sum(sympy.Symbol(jet_name(v, j)) * t**j for j in range(k + 1))
    expanded = sympy.expand(to_sympy(f).xreplace(subs))
    return [from_sympy(expanded.coeff(t, u), jv) for u in range(k + 1)]


@given(polys, st.integers(0, 3))
@settings(max_examples=40, deadline=None)
def test_jet_coefficients_match_sympy_expansion(f, k):
    assert jet_coefficients(f, k) == sympy_jets(f, k)


def test_jet_coefficient_worked_example():
    f = parse_poly("x1*x2^2", ("x1", "x2"))
    assert str(jet_coefficient(f, 1, 1)) == "x1^(1)*x2^2 + 2*x1*x2*x2^(1)"
    with pytest.raises(ValueError):
        jet_coefficient(f, 2, 1)


def test_jet_level_zero_is_identity():
    f = parse_poly("x^2 - y*z + 1", XYZ)
    assert jet_coefficients(f, 0) == [f]
