import pytest

from xtt import surface as A
from xtt.elaborate import Elaborator
from xtt.harness.corpus import corpus_text
from xtt.pretty import show
from xtt.syntax import alpha_equal


def test_parse_declarations():
    decls = A.parse("def id : bool -> bool = \\x. x\n#check tt : bool\n#normalize tt : bool expect tt")
    assert [d.kind for d in decls] == ["def", "check", "normalize"]
    assert decls[0].name == "id"


def test_unicode_and_ascii_agree():
    ascii_ = A.parse("def id : (A : U) -> El A -> El A = \\A x. x")
    uni = A.parse("def id : (A : U) → El A → El A = λ A x. x")
    assert A.parse_expr("\\A x. x") == A.parse_expr("λ A x. x")
    assert ascii_[0].kind == uni[0].kind == "def"


def test_fail_declarations_carry_a_code():
    (d,) = A.parse("#fail E004 #check tt tt : bool")
    assert d.kind == "fail" and d.code == "E004" and d.inner.kind == "check"
    (d,) = A.parse("#fail #check tt tt : bool")
    assert d.code is None


def test_comments_are_ignored():
    assert len(A.parse("-- nothing\n#check tt : bool -- trailing\n")) == 1


def test_parse_error_points_at_the_problem():
    with pytest.raises(A.ParseError) as exc:
        A.parse("def id : bool = λ x")
    assert exc.value.span == (1, 20)


def test_path_application_binds_tighter_than_arrows():
    e = A.parse_expr("p @ i")
    assert isinstance(e, A.SDApp)


def test_formulas():
    assert isinstance(A.parse_formula("i = 0 \\/ j = 1"), A.SOr)
    assert isinstance(A.parse_formula("dd i"), A.SBoundary)
    assert isinstance(A.parse_formula("∂ i"), A.SBoundary)


@pytest.mark.parametrize("name", ["prelude.xtt", "kan-laws.xtt", "typecase.xtt"])
def test_printed_core_reparses_alpha_equal(name):
    el = Elaborator()
    if name != "prelude.xtt":
        for d in A.parse(corpus_text("prelude.xtt")):
            el.declare(d)
    for d in A.parse(corpus_text(name)):
        res = el.declare(d)
        assert res.status == "ok", res.error
        if d.kind in ("def", "check"):
            ty, body = res.cores
            again = A.parse_expr(show(body))
            core = el.check(el.context(), again, el.context().eval(ty))
            assert alpha_equal(core, body)
