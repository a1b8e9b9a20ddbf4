from hypothesis import given, settings
from hypothesis import strategies as st

from xtt.harness.oracle import oracle_entails
from xtt.solver import (
    EMPTY,
    assume,
    assume_all,
    canonical_dim,
    consistent_branches,
    constraint_lines,
    entails,
    equal_formulas,
    is_inconsistent,
    normalize_dim,
)
from xtt.syntax import ONE, ZERO, Eq, Or, Sym, boundary, bottom

i, j, k = Sym.fresh("i"), Sym.fresh("j"), Sym.fresh("k")
NAMES = {i: "i", j: "j", k: "k", ZERO: "0", ONE: "1"}


def test_empty_context_entails_only_reflexive_equations():
    assert entails(EMPTY, Eq(ZERO, ZERO))
    assert entails(EMPTY, Eq(i, i))
    assert not entails(EMPTY, Eq(i, ZERO))
    assert not entails(EMPTY, boundary(i))
    assert not is_inconsistent(EMPTY)


def test_equations_are_transitive():
    st_ = assume_all(EMPTY, [Eq(i, j), Eq(j, ONE)])
    assert entails(st_, Eq(i, ONE))
    b = st_.branches[0]
    assert normalize_dim(b, i) == ONE
    assert canonical_dim(st_, j) == ONE


def test_boundary_assumption_splits():
    st_ = assume(EMPTY, boundary(i))
    assert len(st_.branches) == 2
    assert entails(st_, boundary(i))
    assert not entails(st_, Eq(i, ZERO))
    assert canonical_dim(st_, i) == i


def test_disjunction_elimination_needs_both_branches():
    st_ = assume_all(EMPTY, [Or(Eq(i, ZERO), Eq(j, ZERO)), Eq(i, j)])
    assert entails(st_, Eq(j, ZERO))
    assert entails(st_, Eq(i, ZERO))


def test_inconsistent_branches_are_kept():
    st_ = assume_all(EMPTY, [boundary(i), Eq(i, ZERO)])
    assert len(st_.branches) == 2
    assert not is_inconsistent(st_)
    assert len(consistent_branches(st_)) == 1
    assert is_inconsistent(assume(EMPTY, bottom()))
    assert entails(assume(EMPTY, bottom()), Eq(i, ONE))


def test_false_proves_everything():
    st_ = assume_all(EMPTY, [Eq(i, ZERO), Eq(i, ONE)])
    assert is_inconsistent(st_)
    assert entails(st_, Eq(j, k))


def test_equal_formulas_up_to_commutativity():
    assert equal_formulas(EMPTY, Or(Eq(i, ZERO), Eq(j, ONE)), Or(Eq(j, ONE), Eq(i, ZERO)))
    assert not equal_formulas(EMPTY, Eq(i, ZERO), boundary(i))


def test_constraint_lines():
    st_ = assume_all(EMPTY, [boundary(i), Eq(j, k)])
    show = lambda d: NAMES[d]  # noqa: E731
    lines = constraint_lines(st_, show)
    assert lines[0].startswith("branch 0:")
    assert "0 ~ i" in lines[0] and "j ~ k" in lines[0]
    assert constraint_lines(assume(EMPTY, bottom()))[0].endswith("inconsistent (0 = 1)")


def test_branch_count_is_bounded_by_product_of_disjuncts():
    syms = [Sym.fresh("d") for _ in range(4)]
    st_ = assume_all(EMPTY, [boundary(s) for s in syms])
    assert len(st_.branches) <= 2 ** len(syms)
    assert len(st_.branches) == 16


# -- properties, with the proof-search oracle as reference --

POINTS = [ZERO, ONE, i, j, k]


def atoms():
    return st.builds(Eq, st.sampled_from(POINTS), st.sampled_from(POINTS))


formulas = st.one_of(atoms(), st.builds(Or, atoms(), atoms()))


@settings(max_examples=300, deadline=None)
@given(st.lists(formulas, max_size=3), formulas)
def test_solver_agrees_with_oracle(ctx, goal):
    st_ = assume_all(EMPTY, ctx)
    assert entails(st_, goal) == oracle_entails(
        [_named(c) for c in ctx], _named(goal)
    )


def _named(phi):
    match phi:
        case Eq(a, b):
            return ("eq", NAMES[a], NAMES[b])
        case Or(a, b):
            return ("or", _named(a), _named(b))


@settings(max_examples=200, deadline=None)
@given(st.lists(formulas, max_size=3), formulas, formulas)
def test_entailment_is_monotone(ctx, extra, goal):
    st_ = assume_all(EMPTY, ctx)
    if entails(st_, goal):
        assert entails(assume(st_, extra), goal)


@settings(max_examples=200, deadline=None)
@given(st.lists(formulas, max_size=3), formulas)
def test_assumption_is_idempotent(ctx, phi):
    st_ = assume(assume_all(EMPTY, ctx), phi)
    assert entails(st_, phi)
    assert assume(st_, phi).signature() == st_.signature()
