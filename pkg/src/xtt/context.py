"""Typing contexts: a telescope of dimension, constraint and term entries.

Term entry types are kept as core terms so the whole context can be
re-evaluated under a stronger solver state. Re-evaluation keeps every
variable's symbol, so a term quoted in the old context still means the same
thing in the restricted one.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from xtt import semantics as sem
from xtt import syntax as S
from xtt.domain import Env, HVar, VNeu, Value
from xtt.solver import EMPTY, SolverState, assume, is_inconsistent
from xtt.syntax import Sym


@dataclass(frozen=True)
class Entry:
    kind: str  # "term", "dim" or "formula"
    name: str = ""
    sym: Sym | None = None
    ty: S.Term | None = None
    formula: object = None


@dataclass(frozen=True)
class GlobalDef:
    name: str
    ty_core: S.Term
    ty: Value
    body: S.Term
    value: Value


@dataclass(frozen=True)
class Context:
    entries: tuple = ()
    state: SolverState = EMPTY
    env: Env = field(default_factory=Env)
    types: tuple = ()
    scope: sem.Scope = field(default_factory=sem.Scope)
    defs: Mapping = field(default_factory=dict)
    split_depth: int = 0
    open: bool = False

    @classmethod
    def empty(cls, defs: Mapping | None = None, state: SolverState = EMPTY) -> Context:
        defs = {} if defs is None else defs
        env = Env(globals=_GlobalValues(defs))
        return cls(state=state, env=env, defs=defs)

    @classmethod
    def opened(cls, state: SolverState) -> Context:
        """A context with an open scope, for comparisons outside any telescope."""
        return cls(state=state, scope=sem.Scope(open=True), open=True)

    # -- extension --

    def bind(self, name: str, ty: Value, ty_core: S.Term | None = None):
        """Add a term variable; returns the new context and the variable's value."""
        if ty_core is None and not self.open:
            ty_core = sem.quote_type(self.state, self.scope, ty)
        x = sem.var(ty, name)
        sym = x.head.sym
        cx = replace(
            self,
            entries=self.entries + (Entry("term", name, sym, ty_core),),
            env=self.env.push(x),
            types=self.types + (ty,),
            scope=self.scope.bind(sym),
        )
        return cx, x

    def bind_dim(self, name: str):
        sym = Sym.fresh(name)
        cx = replace(
            self,
            entries=self.entries + (Entry("dim", name, sym),),
            env=self.env.push_dim(sym),
            scope=self.scope.bind_dim(sym),
        )
        return cx, sym

    def assume(self, phi) -> Context:
        """Add a constraint (over symbols and constants) and re-evaluate."""
        entries = self.entries + (Entry("formula", formula=phi),)
        return self._rebuild(assume(self.state, phi), entries)

    def with_state(self, st: SolverState) -> Context:
        return self._rebuild(st, self.entries)

    def deeper(self) -> Context:
        return replace(self, split_depth=self.split_depth + 1)

    def _rebuild(self, st: SolverState, entries: tuple) -> Context:
        if self.open:
            return replace(self, state=st, entries=entries)
        env = Env(globals=self.env.globals)
        types = []
        for e in entries:
            if e.kind == "term":
                ty = sem.eval_term(st, env, e.ty) if not is_inconsistent(st) else sem.VAbort()
                env = env.push(VNeu(ty, HVar(e.sym)))
                types.append(ty)
            elif e.kind == "dim":
                env = env.push_dim(e.sym)
        return replace(self, state=st, entries=entries, env=env, types=tuple(types))

    # -- queries --

    @property
    def inconsistent(self) -> bool:
        return is_inconsistent(self.state)

    def lookup(self, name: str):
        """Resolve a local name to ``("term", index, type)`` or ``("dim", sym)``."""
        k = 0
        for e in reversed(self.entries):
            if e.kind == "term":
                if e.name == name:
                    return "term", k, self.types[len(self.types) - 1 - k]
                k += 1
            elif e.kind == "dim" and e.name == name:
                return "dim", e.sym
        return None

    def dim_syms(self) -> tuple:
        return tuple(e.sym for e in self.entries if e.kind == "dim")

    def term_names(self) -> list[str]:
        return [e.name for e in self.entries if e.kind == "term"]

    def dim_names(self) -> list[str]:
        return [e.name for e in self.entries if e.kind == "dim"]

    # -- evaluation helpers --

    def eval(self, t: S.Term) -> Value:
        return sem.eval_term(self.state, self.env, t)

    def quote(self, ty: Value, v: Value) -> S.Term:
        return sem.quote(self.state, self.scope, ty, v)

    def quote_type(self, ty: Value) -> S.Term:
        return sem.quote_type(self.state, self.scope, ty)

    def refresh(self, ty: Value, v: Value) -> Value:
        """Re-evaluate a value from its read-back under this context's state."""
        if self.open or self.inconsistent:
            return v
        return self.eval(self.quote(ty, v))

    def refresh_type(self, ty: Value) -> Value:
        if self.open or self.inconsistent:
            return ty
        return self.eval(self.quote_type(ty))


class _GlobalValues(Mapping):
    """Definition values seen through the definition table."""

    def __init__(self, defs: Mapping):
        self._defs = defs

    def __getitem__(self, name):
        return self._defs[name].value

    def __iter__(self):
        return iter(self._defs)

    def __len__(self):
        return len(self._defs)
