import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from support import elaborator
from test_syntax import terms

from xtt import surface as A
from xtt import syntax as S
from xtt.coreio import CoreSyntaxError, emit, parse_core
from xtt.harness.corpus import corpus
from xtt.harness.generator import generate_closed_bool
from xtt.syntax import ONE, ZERO, DimVar, Eq


def test_emit_examples():
    assert emit(S.Lam(S.App(S.Var(0, "x"), S.Tt()), "x")) == "(lam x (app (var 0 x) tt))"
    assert emit(S.Coe(ZERO, ONE, S.CodeBool(), S.Tt(), "i")) == "(coe i 0 1 code-bool tt)"


def test_split_branches():
    t = S.DLam(S.Split(((Eq(DimVar(0), ZERO), S.Tt()), (Eq(DimVar(0), ONE), S.Ff()))), "i")
    text = emit(t)
    assert text == "(dlam i (split (branches ((= (dim 0) 0) tt) ((= (dim 0) 1) ff))))"
    assert parse_core(text) == t


@pytest.mark.parametrize("text", ["(lam x", "(frob 1)", "(var x)", "(app tt)", ")"])
def test_malformed_core_is_rejected(text):
    with pytest.raises(CoreSyntaxError):
        parse_core(text)


@settings(max_examples=300, deadline=None)
@given(terms(2, 2))
def test_round_trip_on_random_terms(t):
    assert parse_core(emit(t)) == t


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 16))
def test_round_trip_on_elaborated_generated_terms(seed, size):
    el = elaborator()
    cx = el.context()
    core = el.check(cx, A.parse_expr(generate_closed_bool(seed, size).text), cx.eval(S.Bool()))
    assert S.alpha_equal(parse_core(emit(core)), core)


def test_round_trip_on_the_corpus():
    el = elaborator(prelude=False)
    n = 0
    for _, src in corpus():
        for d in A.parse(src):
            if d.kind == "def" and d.name in el.defs:
                continue
            res = el.declare(d)
            for core in res.cores:
                assert S.alpha_equal(parse_core(emit(core)), core)
                n += 1
    assert n >= 90
