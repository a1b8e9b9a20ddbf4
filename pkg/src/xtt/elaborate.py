"""Bidirectional elaboration of surface syntax into core terms.

Introduction forms are checked, eliminations are inferred. A goal of the
form ``El c`` with ``c`` neutral is taken apart with the typecase
projections, and the goal is then required to be convertible with the
decomposed type, which succeeds only when boundary separation can see
through ``c``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from xtt import semantics as sem
from xtt import surface as A
from xtt import syntax as S
from xtt.context import Context, GlobalDef
from xtt.conversion import DEFAULT_MAX_SPLITS, Conversion
from xtt.domain import (
    Clo,
    DClo,
    HClo,
    HDClo,
    VAbort,
    VBool,
    VCodeBool,
    VCodePath,
    VCodePi,
    VCodeSg,
    VEl,
    VFf,
    VPath,
    VPi,
    VSg,
    VTt,
    VUniv,
)
from xtt.pretty import show
from xtt.solver import EMPTY, entails
from xtt.syntax import ONE, ZERO

log = logging.getLogger("xtt")

ERRORS = {
    "E001": "syntax error",
    "E002": "unbound name",
    "E003": "type mismatch",
    "E004": "expected a function",
    "E005": "expected a pair",
    "E006": "expected a path",
    "E007": "path boundary mismatch",
    "E008": "split does not cover the context",
    "E009": "split branches disagree on an overlap",
    "E010": "abort in a consistent context",
    "E011": "expected a type or a code",
    "E012": "U has no code",
    "E013": "duplicate definition",
    "E014": "normal forms differ",
    "E015": "#fail expectation not met",
    "E016": "conversion undecided within the split budget",
    "E017": "cannot infer a type",
    "E018": "dimension and term variables mixed up",
    "E099": "internal kernel fault",
}

_U = VUniv()
_FORMERS = {"pi": VPi, "sg": VSg, "path": VPath, "bool": VBool}


class ElabError(Exception):
    def __init__(self, code: str, message: str, span=(0, 0), details=()):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.span = span
        self.details = list(details)


@dataclass
class DeclResult:
    name: str
    kind: str
    status: str
    elapsed_ms: float
    error: ElabError | None = None
    branches_split: int = 0
    cores: tuple = ()

    def as_json(self) -> dict:
        out = {
            "name": self.name,
            "kind": self.kind,
            "status": self.status,
            "elapsed-ms": round(self.elapsed_ms, 3),
        }
        if self.error is not None:
            out["error-code"] = self.error.code
        if self.branches_split:
            out["branches-split"] = self.branches_split
        return out


@dataclass
class Elaborator:
    max_splits: int = DEFAULT_MAX_SPLITS
    recheck: bool = False
    defs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.conv = Conversion(self.max_splits)

    def context(self) -> Context:
        return Context.empty(self.defs)

    # -- diagnostics --

    def _show(self, cx: Context, t: S.Term) -> str:
        return show(t, cx.term_names(), cx.dim_names())

    def _show_type(self, cx: Context, ty) -> str:
        try:
            return self._show(cx, cx.quote_type(ty))
        except Exception:  # printing must never mask the real error
            return f"<{type(ty).__name__}>"

    def _conv_details(self) -> list[str]:
        f = self.conv.failure
        if f is None:
            return []
        lines = [f"  mismatch: {f.left}", f"      with: {f.right}"]
        lines += [f"  under {c}" for c in f.constraints]
        return lines

    def _fresh_conv_state(self):
        self.conv.failure = None
        self.conv.undecided = False

    def _mismatch(self, code: str, message: str, span):
        if self.conv.undecided:
            return ElabError("E016", message + " (split budget exhausted)", span, self._conv_details())
        return ElabError(code, message, span, self._conv_details())

    def equal_types(self, cx: Context, a, b) -> bool:
        self._fresh_conv_state()
        return self.conv.equal_types(cx, a, b)

    def equal_values(self, cx: Context, ty, a, b) -> bool:
        self._fresh_conv_state()
        return self.conv.equal_values(cx, ty, a, b)

    # -- dimensions and formulas --

    def dim(self, cx: Context, d: A.SDim):
        if d.value == "0":
            return ZERO
        if d.value == "1":
            return ONE
        hit = cx.lookup(d.value)
        if hit is None:
            if d.value in self.defs:
                raise ElabError("E018", f"definition {d.value!r} used as a dimension", d.span)
            raise ElabError("E002", f"unbound dimension {d.value!r}", d.span)
        if hit[0] != "dim":
            raise ElabError("E018", f"term variable {d.value!r} used as a dimension", d.span)
        return S.DimVar(cx.scope.dim_index(hit[1]))

    def formula(self, cx: Context, phi):
        match phi:
            case A.SEq(lhs, rhs):
                return S.Eq(self.dim(cx, lhs), self.dim(cx, rhs))
            case A.SOr(l, r):
                return S.Or(self.formula(cx, l), self.formula(cx, r))
            case A.SBoundary(d):
                return S.boundary(self.dim(cx, d))
        raise ElabError("E001", "malformed formula", getattr(phi, "span", (0, 0)))

    # -- types --

    def check_type(self, cx: Context, e) -> S.Term:
        if cx.inconsistent:
            return S.Abort()
        match e:
            case A.SUniv():
                return S.Univ()
            case A.SBool():
                return S.Bool()
            case A.SPi(name, dom, cod) | A.SSg(name, dom, cod):
                d = self.check_type(cx, dom)
                inner, _ = cx.bind(name or "_", cx.eval(d), d)
                c = self.check_type(inner, cod)
                return (S.Pi if isinstance(e, A.SPi) else S.Sg)(d, c, name or "_")
            case A.SPath(i, line, left, right):
                inner, _ = cx.bind_dim(i)
                lc = self.check_type(inner, line)
                lv = DClo(cx.env, lc, i)
                a = self.check(cx, left, sem.inst_d(cx.state, lv, ZERO))
                b = self.check(cx, right, sem.inst_d(cx.state, lv, ONE))
                return S.Path(lc, a, b, i)
            case A.SEl(code):
                return S.El(self.check(cx, code, _U))
        core, ty = self.infer(cx, e)
        if isinstance(ty, VUniv):
            return S.El(core)
        raise ElabError(
            "E011", f"expected a type or a code, got a term of type {self._show_type(cx, ty)}", e.span
        )

    # -- checking --

    def check(self, cx: Context, e, ty) -> S.Term:
        if cx.inconsistent or isinstance(ty, VAbort):
            return S.Abort()
        match e:
            case A.SLam(names, body):
                if len(names) > 1:
                    body = A.SLam(names[1:], body, span=e.span)
                pi = self._goal(cx, ty, "pi", e)
                inner, x = cx.bind(names[0], pi.dom)
                b = self.check(inner, body, sem.inst(inner.state, pi.cod, x))
                return S.Lam(b, names[0])
            case A.SPair(fst, snd):
                sg = self._goal(cx, ty, "sg", e)
                a = self.check(cx, fst, sg.dom)
                b = self.check(cx, snd, sem.inst(cx.state, sg.cod, cx.eval(a)))
                return S.Pair(a, b)
            case A.SDLam(names, body):
                if len(names) > 1:
                    body = A.SDLam(names[1:], body, span=e.span)
                path = self._goal(cx, ty, "path", e)
                inner, i = cx.bind_dim(names[0])
                b = self.check(inner, body, sem.inst_d(inner.state, path.line, i))
                self._endpoints(cx, path, b, e)
                return S.DLam(b, names[0])
            case A.SRefl():
                path = self._goal(cx, ty, "path", e)
                start = sem.inst_d(cx.state, path.line, ZERO)
                inner, i = cx.bind_dim("_")
                if not self.equal_types(inner, start, sem.inst_d(inner.state, path.line, i)):
                    raise self._mismatch("E003", "refl needs a constant line", e.span)
                b = S.shift(cx.quote(start, path.left), dims=1)
                self._endpoints(cx, path, b, e)
                return S.DLam(b, "_")
            case A.SSplit():
                return self.check_split(cx, e, ty)
            case A.SAbort():
                raise ElabError("E010", "abort is only allowed in an inconsistent context", e.span)
            case A.STt() | A.SFf() if not isinstance(ty, VUniv):
                self._goal(cx, ty, "bool", e)
                return S.Tt() if isinstance(e, A.STt) else S.Ff()
            case A.SUniv() if isinstance(ty, VUniv):
                raise ElabError("E012", "U is not an element of U: the universe has no code", e.span)
            case A.SBool() | A.SPi() | A.SSg() | A.SPath() if isinstance(ty, VUniv):
                return self._as_code(cx, e)
        core, got = self.infer(cx, e)
        if not self.equal_types(cx, got, ty):
            if isinstance(ty, VUniv):
                raise self._mismatch(
                    "E011", f"expected a code in U, got a term of type {self._show_type(cx, got)}", e.span
                )
            raise self._mismatch(
                "E003",
                f"expected {self._show_type(cx, ty)}, got {self._show_type(cx, got)}",
                e.span,
            )
        return core

    def _as_code(self, cx: Context, e) -> S.Term:
        """Type formers in code position stand for their codes."""
        match e:
            case A.SBool():
                return S.CodeBool()
            case A.SPi(name, dom, cod) | A.SSg(name, dom, cod):
                d = self.check(cx, dom, _U)
                inner, _ = cx.bind(name or "_", sem.do_el(cx.state, cx.eval(d)))
                c = self.check(inner, cod, _U)
                return (S.CodePi if isinstance(e, A.SPi) else S.CodeSg)(d, c, name or "_")
            case A.SPath(i, line, left, right):
                return self._code_path(cx, i, line, left, right)
        raise ElabError("E011", "expected a code", e.span)

    def _code_path(self, cx: Context, i, line, left, right) -> S.Term:
        inner, _ = cx.bind_dim(i)
        lc = self.check(inner, line, _U)
        lv = DClo(cx.env, lc, i)
        a = self.check(cx, left, sem.do_el(cx.state, sem.inst_d(cx.state, lv, ZERO)))
        b = self.check(cx, right, sem.do_el(cx.state, sem.inst_d(cx.state, lv, ONE)))
        return S.CodePath(lc, a, b, i)

    def _goal(self, cx: Context, ty, kind: str, e):
        """The goal as the given former, decomposing a neutral code if needed."""
        former = _FORMERS[kind]
        if isinstance(ty, former):
            return ty
        if isinstance(ty, VEl):
            decomposed = sem.decompose_code(cx.state, ty.code, kind)
            if not self.equal_types(cx, ty, decomposed):
                raise self._mismatch(
                    "E003",
                    f"cannot read {self._show_type(cx, ty)} as a {_KIND_NAMES[kind]} type",
                    e.span,
                )
            return decomposed
        raise ElabError(
            "E003",
            f"a {_KIND_NAMES[kind]} was given where {self._show_type(cx, ty)} is expected",
            e.span,
        )

    def _endpoints(self, cx: Context, path, body: S.Term, e):
        for end, want in ((ZERO, path.left), (ONE, path.right)):
            got = cx.eval(S.instantiate_dim(body, end))
            ty = sem.inst_d(cx.state, path.line, end)
            if not self.equal_values(cx, ty, got, want):
                raise self._mismatch(
                    "E007",
                    f"at {end.value} the path is {self._show(cx, cx.quote(ty, got))}, "
                    f"but the type requires {self._show(cx, cx.quote(ty, want))}",
                    e.span,
                )

    def check_split(self, cx: Context, e: A.SSplit, ty) -> S.Term:
        qty = cx.quote_type(ty)
        arms = []
        for phi_s, body in e.branches:
            phi = self.formula(cx, phi_s)
            arms.append((phi, sem.eval_formula(cx.env, phi), body))
        cover = S.disjoin([sphi for _, sphi, _ in arms])
        if not entails(cx.state, cover):
            shown = " \\/ ".join(f"({self._formula_text(cx, phi)})" for phi, _, _ in arms)
            raise ElabError("E008", f"the split {shown} does not cover the context", e.span)
        cores = []
        for phi, sphi, body in arms:
            sub = cx.assume(sphi)
            if sub.inconsistent:
                cores.append(S.Abort())
                continue
            cores.append(self.check(sub, body, sub.eval(qty)))
        for j in range(len(arms)):
            for k in range(j + 1, len(arms)):
                both = cx.assume(arms[j][1]).assume(arms[k][1])
                if both.inconsistent:
                    continue
                tyjk = both.eval(qty)
                if not self.equal_values(both, tyjk, both.eval(cores[j]), both.eval(cores[k])):
                    raise self._mismatch(
                        "E009",
                        f"branches {self._formula_text(cx, arms[j][0])} and "
                        f"{self._formula_text(cx, arms[k][0])} disagree where both hold",
                        e.branches[k][1].span,
                    )
        return sem.nest_split([(phi, core) for (phi, _, _), core in zip(arms, cores)])

    def _formula_text(self, cx: Context, phi) -> str:
        from xtt.pretty import Printer

        return Printer().formula(phi, cx.dim_names())

    # -- inference --

    def infer(self, cx: Context, e):
        if cx.inconsistent:
            return S.Abort(), VAbort()
        match e:
            case A.SVar(name):
                hit = cx.lookup(name)
                if hit is not None:
                    if hit[0] == "dim":
                        raise ElabError("E018", f"dimension {name!r} used as a term", e.span)
                    return S.Var(hit[1], name), hit[2]
                if name in self.defs:
                    return S.Ref(name), self.defs[name].ty
                raise ElabError("E002", f"unbound name {name!r}", e.span)
            case A.SApp(fn, arg):
                f, fty = self.infer(cx, fn)
                pi = self._former(cx, fty, "pi")
                if pi is None:
                    raise ElabError(
                        "E004",
                        f"expected a function, got a term of type {self._show_type(cx, fty)}",
                        fn.span,
                    )
                a = self.check(cx, arg, pi.dom)
                return S.App(f, a), sem.inst(cx.state, pi.cod, cx.eval(a))
            case A.SProj(inner, which):
                p, pty = self.infer(cx, inner)
                sg = self._former(cx, pty, "sg")
                if sg is None:
                    raise ElabError(
                        "E005",
                        f"expected a pair, got a term of type {self._show_type(cx, pty)}",
                        inner.span,
                    )
                if which == 1:
                    return S.Fst(p), sg.dom
                first = sem.do_fst(cx.state, cx.eval(p))
                return S.Snd(p), sem.inst(cx.state, sg.cod, first)
            case A.SDApp(inner, d):
                p, pty = self.infer(cx, inner)
                path = self._former(cx, pty, "path")
                if path is None:
                    raise ElabError(
                        "E006",
                        f"expected a path, got a term of type {self._show_type(cx, pty)}",
                        inner.span,
                    )
                r = self.dim(cx, d)
                return S.DApp(p, r), sem.inst_d(cx.state, path.line, sem.eval_dim(cx.env, r))
            case A.STt():
                return S.Tt(), VBool()
            case A.SFf():
                return S.Ff(), VBool()
            case A.SIf(x, motive, scrut, on_tt, on_ff):
                inner, _ = cx.bind(x, VBool(), S.Bool())
                mc = self.check_type(inner, motive)
                mot = Clo(cx.env, mc, 1, x)
                b = self.check(cx, scrut, VBool())
                t = self.check(cx, on_tt, sem.inst(cx.state, mot, VTt()))
                f = self.check(cx, on_ff, sem.inst(cx.state, mot, VFf()))
                return S.If(mc, b, t, f, x), sem.inst(cx.state, mot, cx.eval(b))
            case A.SCoe(r, r2, i, line, arg):
                rc, r2c = self.dim(cx, r), self.dim(cx, r2)
                inner, _ = cx.bind_dim(i)
                lc = self.check(inner, line, _U)
                lv = DClo(cx.env, lc, i)
                src = sem.eval_dim(cx.env, rc)
                a = self.check(cx, arg, sem.do_el(cx.state, sem.inst_d(cx.state, lv, src)))
                dst = sem.eval_dim(cx.env, r2c)
                return S.Coe(rc, r2c, lc, a, i), sem.do_el(cx.state, sem.inst_d(cx.state, lv, dst))
            case A.SCom(r, r2, s, i, line, j, tube):
                inner, _ = cx.bind_dim(i)
                lc = self.check(inner, line, _U)
                return self._com(cx, r, r2, s, lc, i, j, tube)
            case A.SHCom(r, r2, s, code, j, tube):
                cc = self.check(cx, code, _U)
                return self._com(cx, r, r2, s, S.shift(cc, dims=1), j, j, tube)
            case A.SAnn(inner, ty):
                tc = self.check_type(cx, ty)
                tv = cx.eval(tc)
                return self.check(cx, inner, tv), tv
            case A.SBoolCode():
                return S.CodeBool(), _U
            case A.SCodePi(dom, x, cod) | A.SCodeSg(dom, x, cod):
                d = self.check(cx, dom, _U)
                inner, _ = cx.bind(x, sem.do_el(cx.state, cx.eval(d)))
                c = self.check(inner, cod, _U)
                return (S.CodePi if isinstance(e, A.SCodePi) else S.CodeSg)(d, c, x), _U
            case A.SCodePath(i, line, left, right):
                return self._code_path(cx, i, line, left, right), _U
            case A.STyCase():
                return self._tycase(cx, e)
            case A.SUniv():
                raise ElabError("E012", "U is not an element of U: the universe has no code", e.span)
            case A.SBool() | A.SPi() | A.SSg() | A.SPath() | A.SEl():
                raise ElabError(
                    "E011", "a type was used as a term; use its code (for example bool^)", e.span
                )
            case A.SAbort():
                raise ElabError("E010", "abort is only allowed in an inconsistent context", e.span)
        raise ElabError(
            "E017", f"cannot infer a type for this {_describe(e)}; add an annotation", e.span
        )

    def _former(self, cx: Context, ty, kind: str):
        former = _FORMERS[kind]
        if isinstance(ty, former):
            return ty
        if isinstance(ty, VEl):
            return sem.decompose_code(cx.state, ty.code, kind)
        return None

    def _com(self, cx: Context, r, r2, s, lc, i, j, tube):
        rc, r2c, sc = self.dim(cx, r), self.dim(cx, r2), self.dim(cx, s)
        lv = DClo(cx.env, lc, i)
        src, wall = sem.eval_dim(cx.env, rc), sem.eval_dim(cx.env, sc)
        inner, jsym = cx.bind_dim(j)
        inner = inner.assume(sem.tube_constraint(jsym, src, wall))
        tc = self.check(inner, tube, sem.do_el(inner.state, sem.inst_d(inner.state, lv, jsym)))
        dst = sem.eval_dim(cx.env, r2c)
        return S.Com(rc, r2c, sc, lc, tc, i), sem.do_el(cx.state, sem.inst_d(cx.state, lv, dst))

    def _tycase(self, cx: Context, e: A.STyCase):
        scrut = self.check(cx, e.scrut, _U)
        inner, _ = cx.bind(e.binder, _U, S.Univ())
        mc = self.check_type(inner, e.motive)
        mot = Clo(cx.env, mc, 1, e.binder)
        bodies = []
        for kind, names, body in e.arms:
            sub = cx
            if kind in ("pi", "sg"):
                sub, u = sub.bind(names[0], _U, S.Univ())
                sub, v = sub.bind(names[1], VPi(sem.do_el(sub.state, u), sem.const_clo(_U)))
                cls = VCodePi if kind == "pi" else VCodeSg
                code = cls(u, HClo(lambda s, x, v=v: sem.do_app(s, v, x), names[1]))
            elif kind == "path":
                sub, u0 = sub.bind(names[0], _U, S.Univ())
                sub, u1 = sub.bind(names[1], _U, S.Univ())
                sub, up = sub.bind(names[2], VPath(sem.const_dclo(_U), u0, u1))
                sub, x0 = sub.bind(names[3], sem.do_el(sub.state, u0))
                sub, x1 = sub.bind(names[4], sem.do_el(sub.state, u1))
                code = VCodePath(HDClo(lambda s, i, up=up: sem.do_dapp(s, up, i)), x0, x1)
            else:
                code = VCodeBool()
            bodies.append(self.check(sub, body, sem.inst(sub.state, mot, code)))
        hints = (e.binder,) + tuple(n for _, names, _ in e.arms for n in names)
        core = S.TypeCase(mc, scrut, *bodies, hints)
        return core, sem.inst(cx.state, mot, cx.eval(scrut))

    # -- declarations --

    def declare(self, d: A.Decl) -> DeclResult:
        """Elaborate one declaration; failures are reported, not raised."""
        t0 = time.perf_counter()
        self.conv = Conversion(self.max_splits)
        error = None
        cores = ()
        try:
            cores = self._declare(d)
        except ElabError as err:
            error = err
        except (sem.KernelFault, S.ScopeError, RecursionError) as exc:
            error = ElabError("E099", f"internal kernel fault: {exc}", d.span)
        elapsed = (time.perf_counter() - t0) * 1000
        status = "ok" if error is None else "fail"
        name = d.label
        log.debug("%s %s %.1fms", name, status, elapsed)
        return DeclResult(name, d.kind, status, elapsed, error, self.conv.splits, cores)

    def _declare(self, d: A.Decl) -> tuple:
        cx = self.context()
        if d.kind == "def":
            if d.name in self.defs:
                raise ElabError("E013", f"{d.name!r} is already defined", d.span)
            tc = self.check_type(cx, d.ty)
            ty = cx.eval(tc)
            body = self.check(cx, d.body, ty)
            if self.recheck:
                self._recheck(tc, body, d.span)
            value = sem.eval_term(EMPTY, cx.env, body)
            self.defs[d.name] = GlobalDef(d.name, tc, ty, body, value)
            return (tc, body)
        if d.kind == "check":
            tc = self.check_type(cx, d.ty)
            body = self.check(cx, d.body, cx.eval(tc))
            if self.recheck:
                self._recheck(tc, body, d.span)
            return (tc, body)
        if d.kind == "normalize":
            tc = self.check_type(cx, d.ty)
            ty = cx.eval(tc)
            body = self.check(cx, d.body, ty)
            want = self.check(cx, d.expect, ty)
            got_nf = cx.quote(ty, cx.eval(body))
            want_nf = cx.quote(ty, cx.eval(want))
            if not S.alpha_equal(got_nf, want_nf):
                raise ElabError(
                    "E014",
                    f"normal form {show(got_nf)} differs from expected {show(want_nf)}",
                    d.span,
                )
            return (tc, body, want)
        if d.kind == "fail":
            saved = dict(self.defs)
            try:
                self._declare(d.inner)
            except ElabError as err:
                if d.code is not None and err.code != d.code:
                    raise ElabError(
                        "E015",
                        f"expected failure {d.code}, got {err.code}: {err.message}",
                        d.span,
                    ) from None
                return ()
            finally:
                self.defs.clear()
                self.defs.update(saved)
            raise ElabError("E015", f"{d.inner.label} was expected to fail but succeeded", d.span)
        raise ElabError("E001", f"unknown declaration kind {d.kind!r}", d.span)

    def _recheck(self, tc: S.Term, body: S.Term, span):
        """Print the core back to surface syntax and elaborate it again."""
        cx = self.context()
        try:
            tc2 = self.check_type(cx, A.parse_expr(show(tc)))
            body2 = self.check(cx, A.parse_expr(show(body)), cx.eval(tc))
        except (ElabError, A.ParseError) as exc:
            raise ElabError("E099", f"core term failed to re-check: {exc}", span) from None
        if not (S.alpha_equal(tc, tc2) and S.alpha_equal(body, body2)):
            raise ElabError("E099", "re-checked core term differs from the original", span)

    def run(self, decls, keep_going: bool = False):
        results = []
        for d in decls:
            res = self.declare(d)
            results.append(res)
            if res.status != "ok" and not keep_going:
                break
        return results

    # -- one-off queries --

    def normalize(self, expr_src: str, type_src: str) -> S.Term:
        cx = self.context()
        self._fresh_conv_state()
        tc = self.check_type(cx, A.parse_expr(type_src))
        ty = cx.eval(tc)
        body = self.check(cx, A.parse_expr(expr_src), ty)
        return cx.quote(ty, cx.eval(body))


_KIND_NAMES = {"pi": "function", "sg": "pair", "path": "path", "bool": "boolean"}


def _describe(e) -> str:
    return {
        A.SLam: "lambda",
        A.SPair: "pair",
        A.SDLam: "path abstraction",
        A.SSplit: "split",
        A.SRefl: "refl",
    }.get(type(e), "expression")


def check_source(src: str, max_splits: int = DEFAULT_MAX_SPLITS, recheck: bool = False):
    """Parse and elaborate a whole file; returns the elaborator and results."""
    decls = A.parse(src)
    el = Elaborator(max_splits=max_splits, recheck=recheck)
    return el, el.run(decls, keep_going=True)
