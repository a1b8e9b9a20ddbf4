"""Face entailment by bounded proof search over the declarative rules.

This is deliberately independent of the solver: formulas are plain tuples,
equations are closed under reflexivity, symmetry and transitivity by graph
search, and disjunctions are handled by the sequent rules (introduction on
the right, elimination on the left). An assumed ``0 = 1`` proves anything.

Formulas: ``("eq", r, s)`` and ``("or", phi, psi)`` with dimensions given as
strings, ``"0"`` and ``"1"`` being the endpoints.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations

from xtt.syntax import DimConst, Eq, Or

MAX_DIMS = 3
MAX_ASSUMPTIONS = 3
MAX_FORMULA_DEPTH = 2
MAX_SEARCH_DEPTH = 8


class BoundExceeded(Exception):
    pass


def depth(phi) -> int:
    if phi[0] == "eq":
        return 1
    return 1 + max(depth(phi[1]), depth(phi[2]))


def dims_of(phi) -> set:
    if phi[0] == "eq":
        return {phi[1], phi[2]} - {"0", "1"}
    return dims_of(phi[1]) | dims_of(phi[2])


@lru_cache(maxsize=1 << 16)
def _components(atoms: frozenset) -> dict:
    """Label every mentioned point with a representative of its component."""
    adj: dict = {}
    for l, r in atoms:
        adj.setdefault(l, []).append(r)
        adj.setdefault(r, []).append(l)
    label: dict = {}
    for start in adj:
        if start in label:
            continue
        label[start] = start
        todo = [start]
        while todo:
            for y in adj[todo.pop()]:
                if y not in label:
                    label[y] = start
                    todo.append(y)
    return label


def _connected(atoms: frozenset, a: str, b: str) -> bool:
    if a == b:
        return True
    comp = _components(atoms)
    return a in comp and comp.get(b) == comp[a]


class Sequent:
    """A fixed assumption list; ``entails`` searches for a derivation of a goal."""

    def __init__(self, context):
        self.context = tuple(to_tuple(c) for c in context)
        _check_context(self.context)
        atoms, pending = frozenset(), ()
        for c in self.context:
            atoms, pending = _extend(atoms, pending, c)
        self.root = (atoms, pending)
        self.memo: dict = {}

    def entails(self, goal) -> bool:
        goal = to_tuple(goal)
        _check_goal(self.context, goal)
        return self._prove(*self.root, goal, MAX_SEARCH_DEPTH)

    def _prove(self, atoms: frozenset, pending: tuple, goal, fuel: int) -> bool:
        if fuel < 0:
            return False
        key = (atoms, pending, goal, fuel)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._search(atoms, pending, goal, fuel)
        return hit

    def _search(self, atoms, pending, goal, fuel) -> bool:
        # ex falso
        if _connected(atoms, "0", "1"):
            return True
        # reflexivity, symmetry, transitivity and assumption for equations
        if goal[0] == "eq" and _connected(atoms, goal[1], goal[2]):
            return True
        # disjunction introduction
        if goal[0] == "or" and (
            self._prove(atoms, pending, goal[1], fuel - 1)
            or self._prove(atoms, pending, goal[2], fuel - 1)
        ):
            return True
        # disjunction elimination on the first pending assumption
        if pending:
            (_, left, right), rest = pending[0], pending[1:]
            return all(
                self._prove(*_extend(atoms, rest, side), goal, fuel - 1) for side in (left, right)
            )
        return False


def _extend(atoms: frozenset, pending: tuple, phi):
    if phi[0] == "eq":
        return atoms | {(phi[1], phi[2])}, pending
    return atoms, pending + (phi,)


def _check_context(context):
    if len(context) > MAX_ASSUMPTIONS:
        raise BoundExceeded("too many assumptions for the oracle")
    if any(depth(f) > MAX_FORMULA_DEPTH for f in context):
        raise BoundExceeded("formula deeper than the oracle bound")
    if len(set().union(*(dims_of(c) for c in context))) > MAX_DIMS:
        raise BoundExceeded("too many dimension variables for the oracle")


@lru_cache(maxsize=4096)
def _check_goal(context, goal):
    if depth(goal) > MAX_FORMULA_DEPTH:
        raise BoundExceeded("formula deeper than the oracle bound")
    if len(dims_of(goal).union(*(dims_of(c) for c in context))) > MAX_DIMS:
        raise BoundExceeded("too many dimension variables for the oracle")


def oracle_entails(context, goal) -> bool:
    """Is ``goal`` derivable from the assumed formulas in ``context``?"""
    return Sequent(context).entails(goal)


def to_tuple(phi):
    """Accept either oracle tuples or kernel formulas."""
    if isinstance(phi, tuple):
        return phi
    match phi:
        case Eq(a, b):
            return ("eq", _dim_name(a), _dim_name(b))
        case Or(a, b):
            return ("or", to_tuple(a), to_tuple(b))
    raise TypeError(phi)


def _dim_name(r) -> str:
    if isinstance(r, DimConst):
        return str(r.value)
    return str(r)


# -- the bounded grid -----------------------------------------------------------


def atoms_over(dims) -> list:
    """Equations between distinct points of ``dims`` plus the endpoints."""
    points = ["0", "1", *dims]
    return [("eq", a, b) for a, b in combinations(points, 2)]


def formulas_over(dims) -> list:
    """Every formula of depth at most two, up to commutativity of ``\\/``."""
    atoms = atoms_over(dims)
    return atoms + [("or", a, b) for a, b in combinations(sorted(atoms, key=_order), 2)]


def queries_over(dims) -> list:
    """Query formulas additionally include the reflexive equations."""
    points = ["0", "1", *dims]
    return formulas_over(dims) + [("eq", p, p) for p in points]


def rename(phi, sub: dict):
    """Apply a renaming of dimension names, keeping equations in point order."""
    if phi[0] == "or":
        a, b = sorted((rename(phi[1], sub), rename(phi[2], sub)), key=_order)
        return ("or", a, b)
    a, b = sorted((sub.get(phi[1], phi[1]), sub.get(phi[2], phi[2])), key=_point)
    return ("eq", a, b)


def _point(p: str):
    return (0, p) if p in ("0", "1") else (1, p)


def _order(phi):
    if phi[0] == "eq":
        return (0, _point(phi[1]), _point(phi[2]))
    return (1, _order(phi[1]), _order(phi[2]))


def grid(max_dims: int = MAX_DIMS, max_assumptions: int = MAX_ASSUMPTIONS, up_to_renaming=True):
    """Yield ``(dims, context)`` for every assumption multiset within bounds.

    Contexts are over exactly ``max_dims`` names, which covers every smaller
    dimension set too. With ``up_to_renaming`` only the least member of each
    orbit under permutations of the names is produced.
    """
    dims = [f"i{k}" for k in range(max_dims)]
    fs = sorted(formulas_over(dims), key=_order)
    rank = {f: n for n, f in enumerate(fs)}
    perms = [
        [rank[rename(f, dict(zip(dims, perm)))] for f in fs] for perm in permutations(dims)
    ]
    for m in range(max_assumptions + 1):
        for ctx in combinations_with_replacement(range(len(fs)), m):
            if up_to_renaming and any(tuple(sorted(p[k] for k in ctx)) < ctx for p in perms):
                continue
            yield dims, tuple(fs[k] for k in ctx)
