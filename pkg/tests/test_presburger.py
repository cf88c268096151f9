import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jetcount.presburger import (
    Affine,
    Bounded,
    ConstructibleFunction,
    ConstructibleParseError,
    Domain,
    MotivicFunctionDesc,
    MotivicSummand,
    SupRefused,
    Term,
    Unbounded,
    classify_nonneg,
    eval_constructible,
    eval_motivic,
    normal_form,
    parse_constructible,
    sup_over_domain,
)
from jetcount.schemes import AffineScheme, affine_space


def P(text):
    return parse_constructible(text)


# ---------------------------------------------------------------- evaluation

def test_eval_examples():
    assert eval_constructible(P("q^(-s)"), 5, 3) == Fraction(1, 125)
    assert eval_constructible(P("s^2 * q^(-s) * geom(-2)"), 2, 2) == Fraction(4, 3)
    half = P("q^(s/2) ; s >= 0 mod 2 0")
    assert eval_constructible(half, 3, 4) == 9


def test_eval_errors():
    f = P("q^(-s) ; s >= 1")
    with pytest.raises(ValueError):
        eval_constructible(f, 1, 2)
    with pytest.raises(ValueError):
        eval_constructible(f, 2, 0)


@pytest.mark.parametrize("text", [
    "1 - q^(s) ; s >= 1",
    "3/2 * (2s-1) * q^(2s-1) - 4 ; s >= 2 mod 3 1",
    "s^2 * q^(-s) * geom(-2) ; s >= 0",
    "q^(s/2) ; s >= 0 mod 2 0",
    "-(s-3) * q^(-3s/2+1) ; s >= 0 mod 2 0",
    "0 ; s >= 4",
])
def test_text_roundtrip(text):
    f = P(text)
    assert P(str(f)) == f


@pytest.mark.parametrize("text", ["q^", "s * * q", "geom(0)", "2 $ s", "q^(s/2)", "s ; s >= 0 mod 2 5", "(s/2)"])
def test_parse_errors(text):
    with pytest.raises(ConstructibleParseError):
        P(text)


# ---------------------------------------------------------------- classification

def test_classify_documented_answers():
    assert classify_nonneg(P("q^(s) * geom(-1)")).answer == "yes"
    res = classify_nonneg(P("1 - q^(s) ; s >= 1"))
    assert (res.answer, res.s, res.q, res.value) == ("counterexample", 1, 2, -1)
    assert classify_nonneg(P("q^(s) - 1 ; s >= 0")).answer == "unknown"


def test_sign_rule_uses_domain():
    assert classify_nonneg(P("(s-3) ; s >= 3")).answer == "yes"
    assert classify_nonneg(P("(s-3) ; s >= 0")).answer == "counterexample"
    assert classify_nonneg(P("(3-s) * geom(1) ; s >= 3")).answer == "yes"


terms_st = st.builds(
    lambda c, a0, a1, betas, geom: Term(Fraction(c), Affine(a1, a0), tuple(Affine(b1, b0) for b1, b0 in betas), tuple(geom)),
    st.integers(-3, 3).filter(bool),
    st.integers(-2, 2),
    st.integers(-2, 2),
    st.lists(st.tuples(st.integers(-1, 1), st.integers(-3, 3)), max_size=2),
    st.lists(st.integers(-2, 2).filter(bool), max_size=2),
)
functions_st = st.builds(
    lambda ts, start: ConstructibleFunction(tuple(ts), Domain(start)),
    st.lists(terms_st, min_size=1, max_size=3),
    st.integers(0, 3),
)
q_st = st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3), Fraction(7)])


@given(functions_st)
@settings(max_examples=150, deadline=None)
def test_yes_means_nonnegative_on_samples(f):
    if classify_nonneg(f).answer != "yes":
        return
    for q in (Fraction(11, 10), Fraction(2), Fraction(9)):
        for s in f.domain.points(f.domain.first + 20):
            assert eval_constructible(f, q, s) >= 0


@given(functions_st)
@settings(max_examples=150, deadline=None)
def test_counterexamples_are_real(f):
    res = classify_nonneg(f)
    if res.answer == "counterexample":
        assert eval_constructible(f, res.q, res.s) == res.value < 0


# ---------------------------------------------------------------- normal form and suprema

monomial_terms = st.builds(
    lambda c, a0, a1, k, geom: Term(Fraction(c), Affine(a1, a0), (Affine(1, 0),) * k, tuple(geom)),
    st.integers(-3, 3).filter(bool), st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 2),
    st.lists(st.integers(-2, 2).filter(bool), max_size=2),
)


@given(st.lists(monomial_terms, min_size=1, max_size=3), st.integers(0, 2))
@settings(max_examples=60, deadline=None)
def test_normal_form_matches_direct_evaluation(ts, start):
    f = ConstructibleFunction(tuple(ts), Domain(start))
    rng = random.Random(str(f))
    for _ in range(50):
        q = Fraction(rng.randint(11, 60), 10)
        s = rng.randint(start, start + 25)
        folded = sum((c * Fraction(s) ** a * q ** (b * s) for c, a, b in normal_form(f, q)), Fraction(0))
        assert folded == eval_constructible(f, q, s)


def test_sup_examples():
    res = sup_over_domain(P("s * q^(-s) ; s >= 0"), 2)
    assert isinstance(res, Bounded) and (res.sup, res.argmax) == (Fraction(1, 2), 1)
    res = sup_over_domain(P("q^(-s) ; s >= 1"), 3)
    assert (res.sup, res.argmax) == (Fraction(1, 3), 1)
    res = sup_over_domain(P("q^(s)"), 2)
    assert isinstance(res, Unbounded)
    c, a, b = res.term
    assert c * Fraction(res.witness_s) ** a * Fraction(2) ** (b * res.witness_s) > 10**6


def test_unbounded_witness_is_least():
    res = sup_over_domain(P("s^2 ; s >= 0"), 2)
    assert res.witness_s == 1001  # 1000^2 equals the threshold, 1001^2 exceeds it


bounded_terms = st.builds(
    lambda c, a, b: Term(Fraction(c), Affine(-b, 0), (Affine(1, 0),) * a),
    st.integers(1, 9), st.integers(0, 4), st.integers(1, 3),
)


@given(st.lists(bounded_terms, min_size=1, max_size=3), st.integers(0, 2), q_st)
@settings(max_examples=80, deadline=None)
def test_sup_dominates_brute_force_sweep(ts, start, q):
    f = ConstructibleFunction(tuple(ts), Domain(start))
    res = sup_over_domain(f, q)
    assert isinstance(res, Bounded)
    assert eval_constructible(f, q, res.argmax) == res.sup
    for s in f.domain.points(4 * max(res.tail_bound, 1)):
        v = eval_constructible(f, q, s)
        assert v <= res.sup
        if s < res.argmax:
            assert v < res.sup


def test_sup_refusals():
    with pytest.raises(SupRefused):
        sup_over_domain(P("(s+1) * q^(-s)"), 2)
    with pytest.raises(SupRefused):
        sup_over_domain(P("1 - q^(s) ; s >= 1"), 2)
    with pytest.raises(SupRefused):
        sup_over_domain(P("q^(-s/2+1/2) ; s >= 1 mod 2 1"), 2)


# ---------------------------------------------------------------- motivic functions

def test_eval_motivic_examples():
    Y = AffineScheme.from_text("Y", ["u", "c"], ["u^2 - c"], 1)
    F = MotivicFunctionDesc((MotivicSummand(Y, ("c",), P("1")),), arity=1)
    assert [eval_motivic(F, 5, (c,)) for c in (1, 2, 0)] == [2, 0, 1]
    line = MotivicFunctionDesc((MotivicSummand(affine_space("x"), (), P("q^(-s)")),))
    assert eval_motivic(line, 3, (), s=1) == 1
    xy = AffineScheme.from_text("XY", ["x", "y"], ["x*y"], 1)
    G = MotivicFunctionDesc((MotivicSummand(xy, (), P("q^(-1)")),))
    assert eval_motivic(G, 7) == Fraction(13, 7)


def test_motivic_arity_checks():
    Y = AffineScheme.from_text("Y", ["u", "c"], ["u^2 - c"], 1)
    with pytest.raises(ValueError):
        MotivicFunctionDesc((MotivicSummand(Y, ("c",), P("1")),), arity=0)
    with pytest.raises(ValueError):
        MotivicSummand(Y, ("z",), P("1"))
