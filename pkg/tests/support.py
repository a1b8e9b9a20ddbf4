"""Helpers shared by the test modules."""

from __future__ import annotations

from functools import lru_cache

from xtt import surface as A
from xtt.context import Context
from xtt.conversion import Conversion
from xtt.elaborate import Elaborator, check_source
from xtt.harness.corpus import corpus_text

# acceptance results, criterion number -> (ok, title, detail); printed by conftest
ACCEPTANCE: dict = {}


@lru_cache(maxsize=None)
def _prelude_defs():
    el, results = check_source(corpus_text("prelude.xtt"))
    assert all(r.status == "ok" for r in results)
    return el.defs


def elaborator(prelude: bool = True, **kw) -> Elaborator:
    defs = dict(_prelude_defs()) if prelude else {}
    return Elaborator(defs=defs, **kw)


def run(src: str, prelude: bool = True, **kw):
    """Elaborate a whole source text; returns the results."""
    el = elaborator(prelude, **kw)
    return el.run(A.parse(src), keep_going=True)


def statuses(src: str, prelude: bool = True) -> list:
    return [(r.status, r.error and r.error.code) for r in run(src, prelude)]


class Scene:
    """A context built from surface syntax, for poking at the kernel directly."""

    def __init__(self, dims: str = "", telescope: str = "", prelude: bool = True, formulas=()):
        self.el = elaborator(prelude)
        cx = self.el.context()
        for name in dims.split():
            cx, _ = cx.bind_dim(name)
        if telescope:
            ty = A.parse_expr(f"{telescope} -> bool")
            while isinstance(ty, A.SPi) and ty.name is not None:
                tc = self.el.check_type(cx, ty.dom)
                cx, _ = cx.bind(ty.name, cx.eval(tc), tc)
                ty = ty.cod
        for phi in formulas:
            from xtt import semantics as sem

            core = self.el.formula(cx, A.parse_formula(phi))
            cx = cx.assume(sem.eval_formula(cx.env, core))
        self.cx: Context = cx

    def dim(self, name: str):
        kind, sym = self.cx.lookup(name)
        assert kind == "dim"
        return sym

    def type(self, src: str):
        return self.cx.eval(self.el.check_type(self.cx, A.parse_expr(src)))

    def core(self, src: str, ty: str):
        return self.el.check(self.cx, A.parse_expr(src), self.type(ty))

    def value(self, src: str, ty: str):
        return self.cx.eval(self.core(src, ty))

    def infer(self, src: str):
        core, ty = self.el.infer(self.cx, A.parse_expr(src))
        return core, ty

    def nf(self, src: str, ty: str):
        t = self.type(ty)
        return self.cx.quote(t, self.cx.eval(self.core(src, ty)))

    def conv(self, ty: str, a: str, b: str, max_splits: int = 12) -> bool:
        t = self.type(ty)
        return Conversion(max_splits).equal_values(
            self.cx, t, self.value(a, ty), self.value(b, ty)
        )

    def conv_types(self, a: str, b: str) -> bool:
        return Conversion().equal_types(self.cx, self.type(a), self.type(b))
