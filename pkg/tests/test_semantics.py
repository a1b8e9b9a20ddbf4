from support import Scene

from xtt import semantics as sem
from xtt import syntax as S
from xtt.domain import (
    Env,
    HCoe,
    HHCom,
    VAbort,
    VBool,
    VCodeBool,
    VCodePi,
    VEl,
    VFf,
    VNeu,
    VPair,
    VPi,
    VSplit,
    VTt,
    VUniv,
    var,
)
from xtt.solver import EMPTY, assume
from xtt.syntax import ONE, ZERO, Eq, Sym

BOOL_CODE = VCodeBool()


def same_nf(scene: Scene, ty: str, a: str, b: str) -> bool:
    return scene.nf(a, ty) == scene.nf(b, ty)


def test_eval_beta_and_projections():
    s = Scene()
    assert isinstance(s.value(r"(\x. x : bool -> bool) ff", "bool"), VFf)
    assert isinstance(s.value("((tt, ff) : bool * bool).2", "bool"), VFf)


def test_dapp_at_endpoints_uses_the_boundary():
    s = Scene(telescope="(a b : bool) (p : path (_. bool) a b)")
    assert s.nf("p @ 0", "bool") == s.nf("a", "bool")
    assert s.nf("p @ 1", "bool") == s.nf("b", "bool")
    p = s.value("p", "path (_. bool) a b")
    i = Sym.fresh("i")
    assert isinstance(sem.do_dapp(s.cx.state, p, i), VNeu)


def test_dapp_under_an_assumption():
    s = Scene(dims="i", telescope="(a b : bool) (p : path (_. bool) a b)", formulas=["i = 1"])
    assert s.nf("p @ i", "bool") == s.nf("b", "bool")


def test_el_decodes_codes():
    st = EMPTY
    assert isinstance(sem.do_el(st, BOOL_CODE), VBool)
    pi = VCodePi(BOOL_CODE, sem.const_clo(BOOL_CODE))
    assert isinstance(sem.do_el(st, pi), VPi)
    x = var(VUniv(), "c")
    assert isinstance(sem.do_el(st, x), VEl)


def test_coe_along_constant_line_is_identity():
    s = Scene(telescope="(a : bool)")
    assert same_nf(s, "bool", "coe 0 1 (_. bool^) a", "a")


def test_coe_at_sigma_goes_componentwise():
    s = Scene()
    v = s.value("coe 0 1 (i. sg^ bool^ (_. bool^)) (tt, ff)", "bool * bool")
    assert isinstance(v, VPair)
    assert isinstance(v.fst, VTt) and isinstance(v.snd, VFf)


def test_coe_between_equal_dimensions():
    s = Scene(dims="i", telescope="(A B : U) (e : path (_. U) A B) (a : El (e @ i))")
    assert same_nf(s, "El (e @ i)", "coe i i (j. e @ j) a", "a")


def test_coe_along_neutral_line_is_stuck():
    s = Scene(telescope="(A B : U) (e : path (_. U) A B) (a : El A)")
    v = s.value("coe 0 1 (i. e @ i) a", "El B")
    assert isinstance(v, VNeu) and isinstance(v.head, HCoe)


def test_coe_along_degenerate_neutral_line_reduces():
    # both ends of the line are bool^, so the line is degenerate and coe is the identity
    s = Scene(telescope="(e : path (_. U) bool^ bool^) (a : bool)")
    assert same_nf(s, "bool", "coe 0 1 (i. e @ i) a", "a")


def test_hcom_with_equal_ends_returns_the_tube():
    s = Scene(dims="k", telescope="(a : bool)")
    assert same_nf(s, "bool", "hcom 0 0 k bool^ (i. a)", "a")


def test_hcom_on_its_wall_returns_the_tube_end():
    s = Scene(dims="k", telescope="(a b : bool) (p : path (_. bool) a b)", formulas=["k = 1"])
    assert same_nf(s, "bool", "hcom 0 1 k bool^ (i. p @ i)", "b")


def test_hcom_at_bool_off_the_wall():
    s = Scene(dims="k", telescope="(a : bool)")
    assert same_nf(s, "bool", "hcom 0 1 k bool^ (i. a)", "a")


def test_hcom_at_pi_is_pointwise():
    s = Scene(dims="k", telescope="(f : bool -> bool)")
    assert same_nf(
        s, "bool -> bool", r"hcom 0 1 k (pi^ bool^ (_. bool^)) (i. f)", r"\x. hcom 0 1 k bool^ (i. f x)"
    )


def test_hcom_at_neutral_code_is_stuck():
    s = Scene(dims="k", telescope="(A : U) (a b : El A) (p : path (_. El A) a b)")
    v = s.value("hcom 0 1 k A (i. p @ i)", "El A")
    assert isinstance(v, VNeu) and isinstance(v.head, HHCom)


def test_com_reduces_to_hcom_of_coe():
    s = Scene(dims="k", telescope="(a : bool)")
    assert same_nf(s, "bool", "com 0 1 k (_. bool^) (i. a)", "a")


def test_typecase_computes_on_codes():
    s = Scene()
    src = "tycase (_. bool) {code} {{ pi u v -> tt | sg u v -> ff | path u0 u1 up x0 x1 -> ff | bool -> ff }}"
    assert isinstance(s.value(src.format(code="(pi^ bool^ (_. bool^))"), "bool"), VTt)
    assert isinstance(s.value(src.format(code="bool^"), "bool"), VFf)


def test_split_chooses_the_entailed_branch():
    s = Scene(dims="i", formulas=["i = 0"])
    assert same_nf(s, "bool", "[ i = 0 -> tt | i = 1 -> ff ]", "tt")


def test_split_on_the_boundary_stays_a_split():
    s = Scene(dims="i", formulas=["dd i"])
    assert isinstance(s.value("[ i = 0 -> tt | i = 1 -> ff ]", "bool"), VSplit)


def test_splits_in_an_inconsistent_state_are_abort():
    i = Sym.fresh("i")
    st = assume(assume(EMPTY, Eq(i, ZERO)), Eq(i, ONE))
    split = S.Split(((Eq(ZERO, ZERO), S.Tt()),))
    assert isinstance(sem.eval_term(st, Env(), split), VAbort)


def test_regular_hcom_at_neutral_code_reduces():
    s = Scene(dims="k", telescope="(A : U) (a : El A)")
    assert same_nf(s, "El A", "hcom 0 1 k A (i. a)", "a")


def test_quote_eta_expands_functions_and_pairs():
    s = Scene(telescope="(f : bool -> bool) (p : bool * bool)")
    assert s.nf("f", "bool -> bool") == s.nf(r"\x. f x", "bool -> bool")
    assert s.nf("p", "bool * bool") == s.nf("(p.1, p.2)", "bool * bool")
    assert isinstance(s.nf("f", "bool -> bool"), S.Lam)


def test_quote_eta_expands_paths():
    s = Scene(telescope="(a b : bool) (p : path (_. bool) a b)")
    assert s.nf("p", "path (_. bool) a b") == s.nf("<i> p @ i", "path (_. bool) a b")


def test_com_decomposes_over_a_neutral_line():
    s = Scene(dims="j k", telescope="(A B : U) (e : path (_. U) A B) (x : El A)")
    for r, r2, w in [("0", "1", "k"), ("0", "j", "k"), ("j", "1", "k"), ("0", "1", "j")]:
        fam, tube = "(i. e @ i)", "(coe 0 i (i. e @ i) x)"
        lhs = f"com {r} {r2} {w} {fam} (i. {tube})"
        rhs = f"hcom {r} {r2} {w} (e @ {r2}) (i. coe i {r2} {fam} {tube})"
        assert s.conv(f"El (e @ {r2})", lhs, rhs)
