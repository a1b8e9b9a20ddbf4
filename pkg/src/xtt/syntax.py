"""Core calculus: dimensions, face formulas, nameless terms and substitution.

Term variables and dimension variables live in two separate de Bruijn index
spaces. A term binder shifts only term indices, a dimension binder only
dimension indices. Binder names are kept as display hints and never take part
in equality, so ``alpha_equal`` is plain structural equality.
"""

from __future__ import annotations

import dataclasses
import itertools
from functools import lru_cache
from dataclasses import dataclass, field
from typing import ClassVar, Iterable, Iterator, Union


class ScopeError(Exception):
    """A variable index escaped its scope. Always a kernel bug."""


# -- dimensions ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DimConst:
    value: int

    def __str__(self):
        return str(self.value)


ZERO = DimConst(0)
ONE = DimConst(1)


@dataclass(frozen=True, slots=True)
class DimVar:
    index: int

    def __str__(self):
        return f"#{self.index}"


Dim = Union[DimConst, DimVar]


_counter = itertools.count()


@dataclass(frozen=True, slots=True)
class Sym:
    """A globally fresh variable of the semantic domain (term or dimension)."""

    id: int
    hint: str = field(default="x", compare=False)

    @classmethod
    def fresh(cls, hint: str = "x") -> Sym:
        return cls(next(_counter), hint)

    def __str__(self):
        return f"{self.hint}{self.id}"

    def __lt__(self, other):
        return self.id < other.id


# -- face formulas ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: object
    rhs: object

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True, slots=True)
class Or:
    left: object
    right: object

    def __str__(self):
        return f"{self.left} \\/ {self.right}"


Formula = Union[Eq, Or]


def bottom() -> Eq:
    return Eq(ZERO, ONE)


def boundary(r) -> Or:
    return Or(Eq(r, ZERO), Eq(r, ONE))


@lru_cache(maxsize=1 << 16)
def disjuncts(phi) -> tuple[Eq, ...]:
    """Flatten nested disjunctions into their equations, left to right."""
    out: list[Eq] = []
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Or):
            stack.append(f.right)
            stack.append(f.left)
        else:
            out.append(f)
    return tuple(out)


def disjoin(phis: Iterable) -> Formula:
    phis = list(phis)
    if not phis:
        return bottom()
    acc = phis[0]
    for phi in phis[1:]:
        acc = Or(acc, phi)
    return acc


def map_formula(phi, f):
    match phi:
        case Eq(l, r):
            return Eq(f(l), f(r))
        case Or(l, r):
            return Or(map_formula(l, f), map_formula(r, f))
    raise TypeError(f"not a formula: {phi!r}")


def formula_dims(phi) -> set:
    return {d for eq in disjuncts(phi) for d in (eq.lhs, eq.rhs)}


# -- terms --------------------------------------------------------------------

# A schema entry is (field, kind, term binders, dimension binders).
# kind is "tm" for a subterm, "dim" for a dimension, "br" for split branches.


class Term:
    SCHEMA: ClassVar[tuple] = ()

    def __str__(self):
        from xtt.pretty import show

        return show(self)


def _term(cls):
    return dataclass(frozen=True, slots=True)(cls)


@_term
class Var(Term):
    index: int
    name: str = field(default="x", compare=False, repr=False)


@_term
class Ref(Term):
    """A reference to a top-level definition."""

    name: str


@_term
class Lam(Term):
    body: Term
    name: str = field(default="x", compare=False, repr=False)
    SCHEMA = (("body", "tm", 1, 0),)


@_term
class App(Term):
    fn: Term
    arg: Term
    SCHEMA = (("fn", "tm", 0, 0), ("arg", "tm", 0, 0))


@_term
class Pair(Term):
    fst: Term
    snd: Term
    SCHEMA = (("fst", "tm", 0, 0), ("snd", "tm", 0, 0))


@_term
class Fst(Term):
    pair: Term
    SCHEMA = (("pair", "tm", 0, 0),)


@_term
class Snd(Term):
    pair: Term
    SCHEMA = (("pair", "tm", 0, 0),)


@_term
class DLam(Term):
    body: Term
    name: str = field(default="i", compare=False, repr=False)
    SCHEMA = (("body", "tm", 0, 1),)


@_term
class DApp(Term):
    path: Term
    dim: Dim
    SCHEMA = (("path", "tm", 0, 0), ("dim", "dim", 0, 0))


@_term
class Tt(Term):
    pass


@_term
class Ff(Term):
    pass


@_term
class If(Term):
    motive: Term
    scrut: Term
    on_tt: Term
    on_ff: Term
    name: str = field(default="x", compare=False, repr=False)
    SCHEMA = (
        ("motive", "tm", 1, 0),
        ("scrut", "tm", 0, 0),
        ("on_tt", "tm", 0, 0),
        ("on_ff", "tm", 0, 0),
    )


@_term
class Abort(Term):
    pass


@_term
class Split(Term):
    """A partial element; one or two branches (zero branches is ``Abort``)."""

    branches: tuple
    SCHEMA = (("branches", "br", 0, 0),)

    def __post_init__(self):
        if not 1 <= len(self.branches) <= 2:
            raise ScopeError("core split takes one or two branches")


@_term
class Coe(Term):
    src: Dim
    dst: Dim
    line: Term
    arg: Term
    name: str = field(default="i", compare=False, repr=False)
    SCHEMA = (
        ("src", "dim", 0, 0),
        ("dst", "dim", 0, 0),
        ("line", "tm", 0, 1),
        ("arg", "tm", 0, 0),
    )


@_term
class Com(Term):
    src: Dim
    dst: Dim
    wall: Dim
    line: Term
    tube: Term
    name: str = field(default="i", compare=False, repr=False)
    SCHEMA = (
        ("src", "dim", 0, 0),
        ("dst", "dim", 0, 0),
        ("wall", "dim", 0, 0),
        ("line", "tm", 0, 1),
        ("tube", "tm", 0, 1),
    )


@_term
class Pi(Term):
    dom: Term
    cod: Term
    name: str = field(default="x", compare=False, repr=False)
    SCHEMA = (("dom", "tm", 0, 0), ("cod", "tm", 1, 0))


@_term
class Sg(Term):
    dom: Term
    cod: Term
    name: str = field(default="x", compare=False, repr=False)
    SCHEMA = (("dom", "tm", 0, 0), ("cod", "tm", 1, 0))


@_term
class Path(Term):
    line: Term
    left: Term
    right: Term
    name: str = field(default="i", compare=False, repr=False)
    SCHEMA = (("line", "tm", 0, 1), ("left", "tm", 0, 0), ("right", "tm", 0, 0))


@_term
class Bool(Term):
    pass


@_term
class Univ(Term):
    pass


@_term
class El(Term):
    code: Term
    SCHEMA = (("code", "tm", 0, 0),)


@_term
class CodePi(Term):
    dom: Term
    cod: Term
    name: str = field(default="x", compare=False, repr=False)
    SCHEMA = (("dom", "tm", 0, 0), ("cod", "tm", 1, 0))


@_term
class CodeSg(Term):
    dom: Term
    cod: Term
    name: str = field(default="x", compare=False, repr=False)
    SCHEMA = (("dom", "tm", 0, 0), ("cod", "tm", 1, 0))


@_term
class CodePath(Term):
    line: Term
    left: Term
    right: Term
    name: str = field(default="i", compare=False, repr=False)
    SCHEMA = (("line", "tm", 0, 1), ("left", "tm", 0, 0), ("right", "tm", 0, 0))


@_term
class CodeBool(Term):
    pass


@_term
class TypeCase(Term):
    motive: Term
    scrut: Term
    on_pi: Term
    on_sg: Term
    on_path: Term
    on_bool: Term
    names: tuple = field(default=(), compare=False, repr=False)
    SCHEMA = (
        ("motive", "tm", 1, 0),
        ("scrut", "tm", 0, 0),
        ("on_pi", "tm", 2, 0),
        ("on_sg", "tm", 2, 0),
        ("on_path", "tm", 5, 0),
        ("on_bool", "tm", 0, 0),
    )


# -- traversal ----------------------------------------------------------------


def children(t: Term) -> Iterator[tuple[Term, int, int]]:
    """Yield ``(subterm, term binders, dim binders)`` for every direct subterm."""
    for name, kind, nt, nd in t.SCHEMA:
        if kind == "tm":
            yield getattr(t, name), nt, nd
        elif kind == "br":
            for _, body in getattr(t, name):
                yield body, 0, 0


def _dims_of(t: Term) -> Iterator[object]:
    for name, kind, _, _ in t.SCHEMA:
        if kind == "dim":
            yield getattr(t, name)
        elif kind == "br":
            for phi, _ in getattr(t, name):
                yield from formula_dims(phi)


def free_vars(t: Term) -> tuple[set[int], set[int]]:
    """Free term indices and free dimension indices of ``t``."""
    terms: set[int] = set()
    dims: set[int] = set()

    def go(t: Term, tdepth: int, ddepth: int):
        if isinstance(t, Var):
            if t.index >= tdepth:
                terms.add(t.index - tdepth)
            return
        for d in _dims_of(t):
            if isinstance(d, DimVar) and d.index >= ddepth:
                dims.add(d.index - ddepth)
        for sub, nt, nd in children(t):
            go(sub, tdepth + nt, ddepth + nd)

    go(t, 0, 0)
    return terms, dims


def free_dimensions(t: Term) -> set[int]:
    return free_vars(t)[1]


def check_scope(t: Term, nterms: int, ndims: int) -> None:
    """Raise ``ScopeError`` if ``t`` mentions a variable outside the scope."""
    terms, dims = free_vars(t)
    if terms and max(terms) >= nterms:
        raise ScopeError(f"term index {max(terms)} out of scope {nterms}")
    if dims and max(dims) >= ndims:
        raise ScopeError(f"dimension index {max(dims)} out of scope {ndims}")


def alpha_equal(t1: Term, t2: Term) -> bool:
    return t1 == t2


# -- substitution -------------------------------------------------------------


@dataclass(frozen=True)
class Subst:
    """A simultaneous substitution for both index spaces.

    Term index ``k`` goes to ``terms[k]`` when ``k < len(terms)`` and to
    ``Var(k - len(terms) + term_shift)`` otherwise; dimensions likewise.
    """

    terms: tuple = ()
    dims: tuple = ()
    term_shift: int = 0
    dim_shift: int = 0

    @classmethod
    def identity(cls) -> Subst:
        return cls()

    @classmethod
    def weaken(cls, terms: int = 0, dims: int = 0) -> Subst:
        return cls(term_shift=terms, dim_shift=dims)

    def term(self, k: int) -> Term:
        if k < 0:
            raise ScopeError(f"negative term index {k}")
        if k < len(self.terms):
            return self.terms[k]
        return Var(k - len(self.terms) + self.term_shift)

    def dim(self, d):
        if not isinstance(d, DimVar):
            return d
        k = d.index
        if k < 0:
            raise ScopeError(f"negative dimension index {k}")
        if k < len(self.dims):
            return self.dims[k]
        return DimVar(k - len(self.dims) + self.dim_shift)

    def under_term(self) -> Subst:
        up = Subst(term_shift=1)
        return Subst(
            (Var(0),) + tuple(substitute(t, up) for t in self.terms),
            self.dims,
            self.term_shift + 1,
            self.dim_shift,
        )

    def under_dim(self) -> Subst:
        up = Subst(dim_shift=1)
        return Subst(
            tuple(substitute(t, up) for t in self.terms),
            (DimVar(0),) + tuple(up.dim(d) for d in self.dims),
            self.term_shift,
            self.dim_shift + 1,
        )

    def then(self, after: Subst) -> Subst:
        """The substitution ``t ↦ substitute(substitute(t, self), after)``."""
        terms = [substitute(t, after) for t in self.terms]
        if self.term_shift < len(after.terms):
            terms.extend(after.terms[self.term_shift :])
            tshift = after.term_shift
        else:
            tshift = after.term_shift + self.term_shift - len(after.terms)
        dims = [after.dim(d) for d in self.dims]
        if self.dim_shift < len(after.dims):
            dims.extend(after.dims[self.dim_shift :])
            dshift = after.dim_shift
        else:
            dshift = after.dim_shift + self.dim_shift - len(after.dims)
        return Subst(tuple(terms), tuple(dims), tshift, dshift)

    def is_identity(self) -> bool:
        return not self.terms and not self.dims and not self.term_shift and not self.dim_shift


def substitute(t: Term, sub: Subst) -> Term:
    if sub.is_identity():
        return t
    if isinstance(t, Var):
        return sub.term(t.index)
    if not t.SCHEMA:
        return t
    changes = {}
    for name, kind, nt, nd in t.SCHEMA:
        value = getattr(t, name)
        if kind == "dim":
            changes[name] = sub.dim(value)
        elif kind == "br":
            changes[name] = tuple(
                (map_formula(phi, sub.dim), substitute(body, sub)) for phi, body in value
            )
        else:
            inner = sub
            for _ in range(nt):
                inner = inner.under_term()
            for _ in range(nd):
                inner = inner.under_dim()
            changes[name] = substitute(value, inner)
    return dataclasses.replace(t, **changes)


def shift(t: Term, terms: int = 0, dims: int = 0) -> Term:
    return substitute(t, Subst.weaken(terms, dims))


def instantiate(t: Term, *values: Term) -> Term:
    """Replace the innermost ``len(values)`` term variables; the last value is index 0."""
    return substitute(t, Subst(terms=tuple(reversed(values))))


def instantiate_dim(t: Term, r) -> Term:
    return substitute(t, Subst(dims=(r,)))
