"""Face-formula entailment by case splitting and union-find.

A state is a disjunctive normal form of the assumptions made so far: one
branch per way of picking a disjunct from every assumed disjunction. Inside a
branch the chosen equations are merged into a union-find partition over the
dimension variables and the two endpoints. A branch that merged 0 with 1 is
kept but flagged inconsistent, and answers every query with ``True``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from xtt.syntax import ONE, ZERO, DimConst, Eq, disjuncts


def _prefer(a, b):
    """Pick the representative of a merged class."""
    if isinstance(a, DimConst):
        return a
    if isinstance(b, DimConst):
        return b
    return a if a < b else b


_EMPTY: Mapping = MappingProxyType({})


@dataclass(frozen=True, eq=False)
class Branch:
    """One union-find partition of ``{dimension variables} ∪ {0, 1}``.

    ``rep`` maps every member of a non-trivial class to its representative;
    ``members`` maps each representative to the full class.
    """

    rep: Mapping = _EMPTY
    members: Mapping = _EMPTY
    inconsistent: bool = False

    def find(self, r):
        return self.rep.get(r, r)

    def same(self, r, s) -> bool:
        return r == s or self.find(r) == self.find(s)

    def union(self, r, s) -> Branch:
        if self.inconsistent:
            return self
        a, b = self.find(r), self.find(s)
        if a == b:
            return self
        new = _prefer(a, b)
        cls = self.members.get(a, (a,)) + self.members.get(b, (b,))
        rep = dict(self.rep)
        for m in cls:
            rep[m] = new
        members = {k: v for k, v in self.members.items() if k not in (a, b)}
        members[new] = cls
        bad = rep.get(ZERO, ZERO) == rep.get(ONE, ONE)
        return Branch(MappingProxyType(rep), MappingProxyType(members), bad)

    def entails_eq(self, eq: Eq) -> bool:
        return self.inconsistent or self.same(eq.lhs, eq.rhs)

    def entails(self, phi) -> bool:
        return self.inconsistent or any(self.same(e.lhs, e.rhs) for e in disjuncts(phi))

    def signature(self) -> tuple:
        """A hashable description of the partition, stable across runs."""
        if self.inconsistent:
            return ("⊥",)
        return tuple(
            sorted(
                tuple(sorted(_key(m) for m in cls)) for cls in self.members.values()
            )
        )

    def classes(self) -> list[tuple]:
        return [tuple(sorted(cls, key=_key)) for cls in self.members.values()]


def _key(d):
    if isinstance(d, DimConst):
        return (0, d.value)
    return (1, d.id)


@dataclass(frozen=True, eq=False)
class SolverState:
    """A non-empty list of branches plus the log of assumed formulas."""

    branches: tuple = (Branch(),)
    log: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not self.branches:
            raise ValueError("a solver state has at least one branch")

    def signature(self) -> tuple:
        return tuple(sorted({b.signature() for b in self.branches}, key=repr))


EMPTY = SolverState()


def assume(s: SolverState, phi) -> SolverState:
    """Extend ``s`` with the assumption ``phi``, splitting on its disjuncts."""
    eqs = disjuncts(phi)
    out: list[Branch] = []
    seen: set = set()

    def push(b: Branch):
        sig = b.signature()
        if sig not in seen:
            seen.add(sig)
            out.append(b)

    for b in s.branches:
        if b.entails(phi):
            push(b)
            continue
        for eq in eqs:
            push(b.union(eq.lhs, eq.rhs))
    return SolverState(tuple(out), s.log + (phi,))


def assume_all(s: SolverState, phis: Iterable) -> SolverState:
    for phi in phis:
        s = assume(s, phi)
    return s


def entails(s: SolverState, phi) -> bool:
    return all(b.entails(phi) for b in s.branches)


def equal_formulas(s: SolverState, phi, psi) -> bool:
    return entails(assume(s, phi), psi) and entails(assume(s, psi), phi)


def is_inconsistent(s: SolverState) -> bool:
    return all(b.inconsistent for b in s.branches)


def normalize_dim(b: Branch, r):
    return b.find(r)


def canonical_dim(s: SolverState, r):
    """The representative of ``r`` if every consistent branch agrees on it."""
    reps = {b.find(r) for b in s.branches if not b.inconsistent}
    if len(reps) == 1:
        return reps.pop()
    return r


def consistent_branches(s: SolverState) -> list[SolverState]:
    """One single-branch state per consistent branch."""
    return [SolverState((b,), s.log) for b in s.branches if not b.inconsistent]


def constraint_lines(s: SolverState, show=str) -> list[str]:
    """Human-readable branch table."""
    lines = []
    for n, b in enumerate(s.branches):
        if b.inconsistent:
            lines.append(f"branch {n}: inconsistent (0 = 1)")
            continue
        eqs = [" ~ ".join(show(m) for m in cls) for cls in b.classes()]
        lines.append(f"branch {n}: " + (", ".join(eqs) if eqs else "no constraints"))
    return lines
