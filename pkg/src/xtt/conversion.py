"""Definitional equality with eta rules and boundary separation.

Comparison is structural first. When that fails, the two sides are read
back, a context dimension that they mention is picked, and the comparison is
repeated with the dimension set to 0 and to 1, each time re-evaluating the
read-back forms under the restricted context. This is boundary separation
applied lazily; it is what makes any two paths with the same endpoints equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from xtt import semantics as sem
from xtt import syntax as S
from xtt.context import Context
from xtt.domain import (
    FApp,
    FDApp,
    FFst,
    FIf,
    FSnd,
    FTypeCase,
    HCoe,
    HHCom,
    HVar,
    VAbort,
    VBool,
    VCodeBool,
    VCodePath,
    VCodePi,
    VCodeSg,
    VDLam,
    VEl,
    VFf,
    VLam,
    VNeu,
    VPair,
    VPath,
    VPi,
    VSg,
    VSplit,
    VTt,
    VUniv,
)
from xtt.solver import (
    canonical_dim,
    consistent_branches,
    constraint_lines,
    entails,
)
from xtt.syntax import ONE, ZERO, Eq

DEFAULT_MAX_SPLITS = 12

_U = VUniv()


@dataclass
class Failure:
    constraints: list
    left: str
    right: str


@dataclass
class Conversion:
    """One conversion checker; holds the memo table and split statistics."""

    max_splits: int = DEFAULT_MAX_SPLITS
    memo: dict = field(default_factory=dict)
    splits: int = 0
    undecided: bool = False
    failure: Failure | None = None

    # -- entry points --

    def equal_types(self, cx: Context, a, b) -> bool:
        if cx.inconsistent:
            return True
        if self._types(cx, a, b):
            return True
        return self._separate(cx, None, a, b)

    def equal_values(self, cx: Context, ty, a, b) -> bool:
        if cx.inconsistent:
            return True
        if self._values(cx, ty, a, b):
            return True
        return self._separate(cx, ty, a, b)

    def equal_open(self, st, ty, a, b) -> bool:
        """Structural comparison of values that may mention unknown variables."""
        return self.equal_values(Context.opened(st), ty, a, b)

    # -- boundary separation --

    def _separate(self, cx: Context, ty, a, b) -> bool:
        if cx.open:
            return False
        st = cx.state
        quote = (lambda v: cx.quote_type(v)) if ty is None else (lambda v: cx.quote(ty, v))
        qa, qb = quote(a), quote(b)
        qty = cx.quote_type(ty) if ty is not None else None
        key = (
            st.signature(),
            tuple(s.id for s in cx.scope.terms),
            tuple(s.id for s in cx.scope.dims),
            qty,
            qa,
            qb,
        )
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.memo[key] = False
        result = self._separate_uncached(cx, qty, qa, qb)
        self.memo[key] = result
        return result

    def _separate_uncached(self, cx: Context, qty, qa, qb) -> bool:
        st = cx.state
        branches = consistent_branches(st)
        if len(branches) > 1:
            return all(self._recheck(cx.with_state(b), qty, qa, qb) for b in branches)
        if qa == qb:
            return True
        dim = self._pick_dim(cx, qty, qa, qb)
        if dim is None:
            self._record(cx, qa, qb)
            return False
        if cx.split_depth >= self.max_splits:
            self.undecided = True
            self._record(cx, qa, qb)
            return False
        self.splits += 1
        for end in (ZERO, ONE):
            sub = cx.assume(Eq(dim, end)).deeper()
            if sub.inconsistent:
                continue
            if not self._recheck(sub, qty, qa, qb):
                return False
        return True

    def _recheck(self, cx: Context, qty, qa, qb) -> bool:
        if cx.inconsistent:
            return True
        if qty is None:
            return self.equal_types(cx, cx.eval(qa), cx.eval(qb))
        return self.equal_values(cx, cx.eval(qty), cx.eval(qa), cx.eval(qb))

    def _pick_dim(self, cx: Context, *terms):
        mentioned = set()
        for t in terms:
            if t is not None:
                mentioned |= S.free_dimensions(t)
        dims = cx.scope.dims
        for k, sym in enumerate(dims):
            index = len(dims) - 1 - k
            if index not in mentioned:
                continue
            if entails(cx.state, Eq(sym, ZERO)) or entails(cx.state, Eq(sym, ONE)):
                continue
            return sym
        return None

    def _record(self, cx: Context, qa, qb):
        from xtt.pretty import show

        names = [s.hint for s in cx.scope.terms]
        dnames = [s.hint for s in cx.scope.dims]
        self.failure = Failure(
            constraint_lines(cx.state, str),
            show(qa, names, dnames),
            show(qb, names, dnames),
        )

    # -- partial values --

    def _cases(self, cx: Context, v):
        """The branches of a partial value that are live in ``cx``."""
        if not isinstance(v, VSplit):
            return None
        for phi, w in v.branches:
            if entails(cx.state, phi):
                return [(None, w)]
        return [(phi, w) for phi, w in v.branches]

    def _by_cases(self, cx: Context, v, check) -> bool:
        for phi, w in self._cases(cx, v):
            sub = cx if phi is None else cx.assume(phi)
            if sub.inconsistent:
                continue
            if not check(sub, w):
                return False
        return True

    # -- types --

    def _types(self, cx: Context, a, b) -> bool:
        if isinstance(a, VAbort) or isinstance(b, VAbort):
            return True
        if isinstance(a, VSplit):
            return self._by_cases(cx, a, lambda c, w: self.equal_types(c, w, b))
        if isinstance(b, VSplit):
            return self._by_cases(cx, b, lambda c, w: self.equal_types(c, a, w))
        match a, b:
            case (VPi(), VPi()) | (VSg(), VSg()) if type(a) is type(b):
                if not self.equal_types(cx, a.dom, b.dom):
                    return False
                inner, x = cx.bind(a.cod.hint if hasattr(a.cod, "hint") else "x", a.dom)
                return self.equal_types(
                    inner, sem.inst(inner.state, a.cod, x), sem.inst(inner.state, b.cod, x)
                )
            case VPath(), VPath():
                inner, i = cx.bind_dim("i")
                st = inner.state
                la, lb = sem.inst_d(st, a.line, i), sem.inst_d(st, b.line, i)
                if not self.equal_types(inner, la, lb):
                    return False
                return self.equal_values(
                    cx, sem.inst_d(cx.state, a.line, ZERO), a.left, b.left
                ) and self.equal_values(cx, sem.inst_d(cx.state, a.line, ONE), a.right, b.right)
            case VBool(), VBool():
                return True
            case VUniv(), VUniv():
                return True
            case VEl(), VEl():
                return self.equal_values(cx, _U, a.code, b.code)
        return False

    # -- values --

    def _values(self, cx: Context, ty, a, b) -> bool:
        if isinstance(a, VAbort) or isinstance(b, VAbort) or isinstance(ty, VAbort):
            return True
        if isinstance(ty, VSplit):
            return self._by_cases(
                cx, ty, lambda c, t: self.equal_values(c, t, c.refresh(ty, a), c.refresh(ty, b))
            )
        if isinstance(ty, VPi):
            inner, x = cx.bind(getattr(ty.cod, "hint", "x"), ty.dom)
            st = inner.state
            return self.equal_values(
                inner, sem.inst(st, ty.cod, x), sem.do_app(st, a, x), sem.do_app(st, b, x)
            )
        if isinstance(ty, VSg):
            st = cx.state
            a1, b1 = sem.do_fst(st, a), sem.do_fst(st, b)
            if not self.equal_values(cx, ty.dom, a1, b1):
                return False
            return self.equal_values(
                cx, sem.inst(st, ty.cod, a1), sem.do_snd(st, a), sem.do_snd(st, b)
            )
        if isinstance(ty, VPath):
            inner, i = cx.bind_dim(getattr(ty.line, "hint", "i"))
            st = inner.state
            return self.equal_values(
                inner,
                sem.inst_d(st, ty.line, i),
                sem.do_dapp(st, a, i),
                sem.do_dapp(st, b, i),
            )
        if isinstance(a, VSplit):
            return self._by_cases(
                cx, a, lambda c, w: self.equal_values(c, ty, w, b)
            )
        if isinstance(b, VSplit):
            return self._by_cases(
                cx, b, lambda c, w: self.equal_values(c, ty, a, w)
            )
        if isinstance(ty, VEl):
            kind = _intro_kind(a) or _intro_kind(b)
            if kind is not None:
                return self.equal_values(cx, sem.decompose_code(cx.state, ty.code, kind), a, b)
        if isinstance(a, VNeu) and isinstance(b, VNeu):
            return self._neutrals(cx, a, b)
        if isinstance(ty, VUniv):
            return self._codes(cx, a, b)
        match a, b:
            case (VTt(), VTt()) | (VFf(), VFf()):
                return True
        return False

    def _codes(self, cx: Context, a, b) -> bool:
        match a, b:
            case (VCodePi(), VCodePi()) | (VCodeSg(), VCodeSg()) if type(a) is type(b):
                if not self.equal_values(cx, _U, a.dom, b.dom):
                    return False
                inner, x = cx.bind(getattr(a.cod, "hint", "x"), sem.do_el(cx.state, a.dom))
                st = inner.state
                return self.equal_values(inner, _U, sem.inst(st, a.cod, x), sem.inst(st, b.cod, x))
            case VCodePath(), VCodePath():
                inner, i = cx.bind_dim(getattr(a.line, "hint", "i"))
                st = inner.state
                if not self.equal_values(
                    inner, _U, sem.inst_d(st, a.line, i), sem.inst_d(st, b.line, i)
                ):
                    return False
                st = cx.state
                return self.equal_values(
                    cx, sem.do_el(st, sem.inst_d(st, a.line, ZERO)), a.left, b.left
                ) and self.equal_values(
                    cx, sem.do_el(st, sem.inst_d(st, a.line, ONE)), a.right, b.right
                )
            case VCodeBool(), VCodeBool():
                return True
        return False

    # -- neutrals --

    def _neutrals(self, cx: Context, a: VNeu, b: VNeu) -> bool:
        if len(a.spine) != len(b.spine):
            return False
        if not self._heads(cx, a.head, b.head):
            return False
        st = cx.state
        for fa, fb in zip(a.spine, b.spine):
            if type(fa) is not type(fb):
                return False
            if isinstance(fa, FApp):
                if not self.equal_values(cx, fa.arg_ty, fa.arg, fb.arg):
                    return False
            elif isinstance(fa, FDApp):
                if canonical_dim(st, fa.dim) != canonical_dim(st, fb.dim) and not entails(
                    st, Eq(fa.dim, fb.dim)
                ):
                    return False
            elif isinstance(fa, (FFst, FSnd)):
                continue
            elif isinstance(fa, FIf):
                if not self._if_frames(cx, fa, fb):
                    return False
            elif isinstance(fa, FTypeCase):
                if not self._typecase_frames(cx, fa, fb):
                    return False
            else:
                return False
        return True

    def _heads(self, cx: Context, h1, h2) -> bool:
        st = cx.state
        if isinstance(h1, HVar) and isinstance(h2, HVar):
            return h1.sym == h2.sym
        if isinstance(h1, HCoe) and isinstance(h2, HCoe):
            if not (_same_dim(st, h1.src, h2.src) and _same_dim(st, h1.dst, h2.dst)):
                return False
            inner, i = cx.bind_dim("i")
            if not self.equal_values(
                inner, _U, sem.inst_d(inner.state, h1.line, i), sem.inst_d(inner.state, h2.line, i)
            ):
                return False
            src_ty = sem.do_el(st, sem.inst_d(st, h1.line, h1.src))
            return self.equal_values(cx, src_ty, h1.arg, h2.arg)
        if isinstance(h1, HHCom) and isinstance(h2, HHCom):
            if not (
                _same_dim(st, h1.src, h2.src)
                and _same_dim(st, h1.dst, h2.dst)
                and _same_dim(st, h1.wall, h2.wall)
            ):
                return False
            if not self.equal_values(cx, _U, h1.code, h2.code):
                return False
            inner, i = cx.bind_dim("i")
            inner = inner.assume(sem.tube_constraint(i, h1.src, h1.wall))
            st2 = inner.state
            ty = sem.do_el(st2, h1.code)
            return self.equal_values(
                inner, ty, sem.inst_d(st2, h1.tube, i), sem.inst_d(st2, h2.tube, i)
            )
        return False

    def _motives(self, cx: Context, m1, m2, dom) -> bool:
        inner, x = cx.bind("x", dom)
        st = inner.state
        return self.equal_types(inner, sem.inst(st, m1, x), sem.inst(st, m2, x))

    def _if_frames(self, cx: Context, f1: FIf, f2: FIf) -> bool:
        st = cx.state
        if not self._motives(cx, f1.motive, f2.motive, VBool()):
            return False
        return self.equal_values(
            cx, sem.inst(st, f1.motive, VTt()), f1.on_tt, f2.on_tt
        ) and self.equal_values(cx, sem.inst(st, f1.motive, VFf()), f1.on_ff, f2.on_ff)

    def _typecase_frames(self, cx: Context, f1: FTypeCase, f2: FTypeCase) -> bool:
        if not self._motives(cx, f1.motive, f2.motive, _U):
            return False
        st = cx.state
        for code_cls, c1, c2 in ((VCodePi, f1.on_pi, f2.on_pi), (VCodeSg, f1.on_sg, f2.on_sg)):
            inner, u = cx.bind("u", _U)
            st2 = inner.state
            inner, v = inner.bind("v", VPi(sem.do_el(st2, u), sem.const_clo(_U)))
            code = code_cls(u, sem.HClo(lambda s, x, v=v: sem.do_app(s, v, x)))
            target = sem.inst(st2, f1.motive, code)
            if not self.equal_values(inner, target, sem.inst(st2, c1, u, v), sem.inst(st2, c2, u, v)):
                return False
        inner, u0 = cx.bind("u0", _U)
        inner, u1 = inner.bind("u1", _U)
        inner, up = inner.bind("up", VPath(sem.const_dclo(_U), u0, u1))
        st2 = inner.state
        inner, x0 = inner.bind("x0", sem.do_el(st2, u0))
        inner, x1 = inner.bind("x1", sem.do_el(st2, u1))
        code = VCodePath(sem.HDClo(lambda s, i: sem.do_dapp(s, up, i)), x0, x1)
        args = (u0, u1, up, x0, x1)
        if not self.equal_values(
            inner,
            sem.inst(st2, f1.motive, code),
            sem.inst(st2, f1.on_path, *args),
            sem.inst(st2, f2.on_path, *args),
        ):
            return False
        return self.equal_values(
            cx, sem.inst(st, f1.motive, VCodeBool()), sem.inst(st, f1.on_bool), sem.inst(st, f2.on_bool)
        )


def _same_dim(st, r, s) -> bool:
    return canonical_dim(st, r) == canonical_dim(st, s) or entails(st, Eq(r, s))


def _intro_kind(v):
    if isinstance(v, VLam):
        return "pi"
    if isinstance(v, VPair):
        return "sg"
    if isinstance(v, VDLam):
        return "path"
    return None


def equal_types(cx: Context, a, b, max_splits: int = DEFAULT_MAX_SPLITS) -> bool:
    return Conversion(max_splits).equal_types(cx, a, b)


def equal_values(cx: Context, ty, a, b, max_splits: int = DEFAULT_MAX_SPLITS) -> bool:
    return Conversion(max_splits).equal_values(cx, ty, a, b)
