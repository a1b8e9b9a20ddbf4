from functools import lru_cache

from hypothesis import given, settings
from hypothesis import strategies as st

from xtt import syntax as S
from xtt.syntax import ONE, ZERO, DimVar, Eq, Or, Subst


@lru_cache(maxsize=None)
def dims(nd):
    opts = [st.just(ZERO), st.just(ONE)]
    if nd:
        opts.append(st.integers(0, nd - 1).map(DimVar))
    return st.one_of(opts)


@lru_cache(maxsize=None)
def terms(nt: int, nd: int, depth: int = 3):
    leaves = [st.just(S.Tt()), st.just(S.Ff()), st.just(S.Bool())]
    if nt:
        leaves.append(st.integers(0, nt - 1).map(S.Var))
    leaf = st.one_of(leaves)
    if depth == 0:
        return leaf
    sub = lambda a=0, b=0: terms(nt + a, nd + b, depth - 1)  # noqa: E731
    return st.one_of(
        leaf,
        sub(1).map(S.Lam),
        st.builds(S.App, sub(), sub()),
        st.builds(S.Pair, sub(), sub()),
        sub().map(S.Fst),
        sub(0, 1).map(S.DLam),
        st.builds(S.DApp, sub(), dims(nd)),
        st.builds(S.Coe, dims(nd), dims(nd), sub(0, 1), sub()),
        st.builds(S.If, sub(1), sub(), sub(), sub()),
        st.builds(
            lambda r, a, b: S.Split(((Eq(r, ZERO), a), (Eq(r, ONE), b))),
            dims(nd), sub(), sub(),
        ),
    )


def substs(nt_from: int, nd_from: int, nt_to: int, nd_to: int):
    return st.builds(
        Subst,
        st.tuples(*[terms(nt_to, nd_to, 1) for _ in range(nt_from)]),
        st.tuples(*[dims(nd_to) for _ in range(nd_from)]),
        st.just(nt_to),
        st.just(nd_to),
    )


# -- examples --


def test_instantiate_replaces_innermost_variable():
    t = S.App(S.Var(0), S.Var(1))
    assert S.instantiate(t, S.Tt()) == S.App(S.Tt(), S.Var(0))


def test_substitution_goes_under_binders():
    t = S.Lam(S.App(S.Var(0), S.Var(1)))
    assert S.instantiate(t, S.Ff()) == S.Lam(S.App(S.Var(0), S.Ff()))


def test_dimension_substitution_reaches_split_formulas():
    t = S.Split(((Eq(DimVar(0), ZERO), S.Tt()), (Eq(DimVar(0), ONE), S.Ff())))
    out = S.instantiate_dim(t, ONE)
    assert out.branches[0][0] == Eq(ONE, ZERO)


def test_free_dimensions_skip_bound_ones():
    t = S.DLam(S.DApp(S.Var(0), DimVar(1)))
    assert S.free_dimensions(t) == {0}
    assert S.free_dimensions(S.DLam(S.DApp(S.Var(0), DimVar(0)))) == set()


def test_coe_binds_a_dimension_in_its_line():
    t = S.Coe(ZERO, DimVar(0), S.Path(S.Bool(), S.Tt(), S.DApp(S.Var(0), DimVar(1))), S.Tt())
    assert S.free_dimensions(t) == {0}


def test_alpha_equality_ignores_binder_names():
    assert S.alpha_equal(S.Lam(S.Var(0), "x"), S.Lam(S.Var(0), "y"))
    assert not S.alpha_equal(S.Lam(S.Var(0)), S.Lam(S.Var(1)))


def test_check_scope_rejects_escaping_index():
    S.check_scope(S.Lam(S.Var(1)), 1, 0)
    try:
        S.check_scope(S.Lam(S.Var(1)), 0, 0)
    except S.ScopeError:
        pass
    else:
        raise AssertionError("expected a scope error")


def test_boundary_and_disjuncts():
    i = DimVar(0)
    assert S.boundary(i) == Or(Eq(i, ZERO), Eq(i, ONE))
    phi = Or(Or(Eq(i, ZERO), Eq(i, ONE)), Eq(ZERO, ONE))
    assert S.disjuncts(phi) == (Eq(i, ZERO), Eq(i, ONE), Eq(ZERO, ONE))
    assert S.disjoin([]) == S.bottom()


# -- properties --


@settings(max_examples=200, deadline=None)
@given(terms(2, 2))
def test_identity_substitution(t):
    assert S.substitute(t, Subst.identity()) == t


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_substitution_composes(data):
    t = data.draw(terms(2, 2))
    s1 = data.draw(substs(2, 2, 2, 1))
    s2 = data.draw(substs(2, 1, 1, 1))
    assert S.substitute(S.substitute(t, s1), s2) == S.substitute(t, s1.then(s2))


@settings(max_examples=200, deadline=None)
@given(terms(2, 2))
def test_weakening_shifts_free_dimensions(t):
    assert S.free_dimensions(S.shift(t, dims=1)) == {d + 1 for d in S.free_dimensions(t)}


@settings(max_examples=200, deadline=None)
@given(terms(2, 2), dims(2))
def test_instantiating_a_fresh_dimension_is_a_no_op(t, r):
    assert S.instantiate_dim(S.shift(t, dims=1), r) == t


@settings(max_examples=200, deadline=None)
@given(terms(2, 3), st.integers(0, 2))
def test_substituting_a_constant_removes_the_dimension(t, k):
    sub = Subst(dims=tuple(ZERO if j == k else DimVar(j) for j in range(k + 1)), dim_shift=k)
    out = S.substitute(t, sub)
    fd = S.free_dimensions(t)
    assert S.free_dimensions(out) == {d if d < k else d - 1 for d in fd if d != k}


@settings(max_examples=100, deadline=None)
@given(terms(1, 1))
def test_alpha_equal_is_structural(t):
    renamed = S.Lam(t, "other")
    assert S.alpha_equal(S.Lam(t, "x"), renamed)
