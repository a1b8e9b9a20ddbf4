"""Evaluation, Kan operations, typecase, decoding and read-back.

Every operation takes the ambient solver state first. Dimensions are
canonicalised against the state before they reach a closure, so a body
instantiated at a dimension known to equal an endpoint sees the endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

from xtt import syntax as S
from xtt.domain import (
    Clo,
    DClo,
    Env,
    FApp,
    FDApp,
    FFst,
    FIf,
    FSnd,
    FTypeCase,
    HClo,
    HCoe,
    HDClo,
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
    Value,
    var,
)
from xtt.solver import assume, canonical_dim, entails, is_inconsistent
from xtt.syntax import ONE, ZERO, DimConst, DimVar, Eq, Or, Sym, boundary


class KernelFault(Exception):
    """An internal invariant failed; the elaborator should have prevented it."""


# -- closures -----------------------------------------------------------------


def inst(st, clo, *args) -> Value:
    if isinstance(clo, Clo):
        if len(args) != clo.arity:
            raise KernelFault(f"closure expects {clo.arity} arguments, got {len(args)}")
        return eval_term(st, clo.env.push(*args), clo.body)
    return clo.fn(st, *args)


def inst_d(st, clo, r) -> Value:
    r = canonical_dim(st, r)
    if isinstance(clo, DClo):
        return eval_term(st, clo.env.push_dim(r), clo.body)
    return clo.fn(st, r)


def const_clo(v: Value) -> HClo:
    return HClo(lambda st, *_: v)


def const_dclo(v: Value) -> HDClo:
    return HDClo(lambda st, _: v)


# -- evaluation ---------------------------------------------------------------


def eval_dim(env: Env, r):
    if isinstance(r, DimVar):
        try:
            return env.lookup_dim(r.index)
        except IndexError:
            raise S.ScopeError(f"dimension index {r.index} out of scope") from None
    return r


def eval_formula(env: Env, phi):
    return S.map_formula(phi, lambda r: eval_dim(env, r))


def eval_term(st, env: Env, t: S.Term) -> Value:
    try:
        fn = _EVAL[type(t)]
    except KeyError:
        raise KernelFault(f"cannot evaluate {type(t).__name__}") from None
    return fn(st, env, t)


def _ev_var(st, env, t):
    try:
        return env.lookup(t.index)
    except IndexError:
        raise S.ScopeError(f"term index {t.index} out of scope") from None


def _ev_ref(st, env, t):
    try:
        return env.globals[t.name]
    except KeyError:
        raise KernelFault(f"unknown definition {t.name}") from None


def _ev_split(st, env, t):
    branches = [
        (eval_formula(env, phi), (lambda s, body=body: eval_term(s, env, body)))
        for phi, body in t.branches
    ]
    return mk_split(st, branches)


def _ev_abort(st, env, t):
    if is_inconsistent(st):
        return VAbort()
    raise KernelFault("abort evaluated in a consistent context")


_EVAL = {
    S.Var: _ev_var,
    S.Ref: _ev_ref,
    S.Lam: lambda st, env, t: VLam(Clo(env, t.body, 1, t.name)),
    S.App: lambda st, env, t: do_app(st, eval_term(st, env, t.fn), eval_term(st, env, t.arg)),
    S.Pair: lambda st, env, t: VPair(eval_term(st, env, t.fst), eval_term(st, env, t.snd)),
    S.Fst: lambda st, env, t: do_fst(st, eval_term(st, env, t.pair)),
    S.Snd: lambda st, env, t: do_snd(st, eval_term(st, env, t.pair)),
    S.DLam: lambda st, env, t: VDLam(DClo(env, t.body, t.name)),
    S.DApp: lambda st, env, t: do_dapp(st, eval_term(st, env, t.path), eval_dim(env, t.dim)),
    S.Tt: lambda st, env, t: VTt(),
    S.Ff: lambda st, env, t: VFf(),
    S.If: lambda st, env, t: do_if(
        st,
        Clo(env, t.motive, 1, t.name),
        eval_term(st, env, t.scrut),
        eval_term(st, env, t.on_tt),
        eval_term(st, env, t.on_ff),
    ),
    S.Abort: _ev_abort,
    S.Split: _ev_split,
    S.Coe: lambda st, env, t: do_coe(
        st,
        eval_dim(env, t.src),
        eval_dim(env, t.dst),
        DClo(env, t.line, t.name),
        eval_term(st, env, t.arg),
    ),
    S.Com: lambda st, env, t: do_com(
        st,
        eval_dim(env, t.src),
        eval_dim(env, t.dst),
        eval_dim(env, t.wall),
        DClo(env, t.line, t.name),
        DClo(env, t.tube, t.name),
    ),
    S.Pi: lambda st, env, t: VPi(eval_term(st, env, t.dom), Clo(env, t.cod, 1, t.name)),
    S.Sg: lambda st, env, t: VSg(eval_term(st, env, t.dom), Clo(env, t.cod, 1, t.name)),
    S.Path: lambda st, env, t: VPath(
        DClo(env, t.line, t.name), eval_term(st, env, t.left), eval_term(st, env, t.right)
    ),
    S.Bool: lambda st, env, t: VBool(),
    S.Univ: lambda st, env, t: VUniv(),
    S.El: lambda st, env, t: do_el(st, eval_term(st, env, t.code)),
    S.CodePi: lambda st, env, t: VCodePi(eval_term(st, env, t.dom), Clo(env, t.cod, 1, t.name)),
    S.CodeSg: lambda st, env, t: VCodeSg(eval_term(st, env, t.dom), Clo(env, t.cod, 1, t.name)),
    S.CodePath: lambda st, env, t: VCodePath(
        DClo(env, t.line, t.name), eval_term(st, env, t.left), eval_term(st, env, t.right)
    ),
    S.CodeBool: lambda st, env, t: VCodeBool(),
    S.TypeCase: lambda st, env, t: do_typecase(
        st,
        Clo(env, t.motive, 1),
        eval_term(st, env, t.scrut),
        Clo(env, t.on_pi, 2),
        Clo(env, t.on_sg, 2),
        Clo(env, t.on_path, 5),
        Clo(env, t.on_bool, 0),
    ),
}


# -- partial elements ---------------------------------------------------------


def mk_split(st, branches) -> Value:
    """Select the first entailed branch, or build a partial value.

    ``branches`` pairs a semantic formula with a thunk ``fn(state)``.
    """
    if is_inconsistent(st):
        return VAbort()
    for phi, thunk in branches:
        if entails(st, phi):
            return thunk(st)
    out = []
    for phi, thunk in branches:
        sub = assume(st, phi)
        if not is_inconsistent(sub):
            out.append((phi, thunk(sub)))
    if not out:
        return VAbort()
    return VSplit(tuple(out))


def _distribute(st, v: VSplit, fn) -> Value:
    return VSplit(tuple((phi, fn(assume(st, phi), w)) for phi, w in v.branches))


# -- eliminators --------------------------------------------------------------


def do_app(st, f: Value, a: Value) -> Value:
    if isinstance(f, VLam):
        return inst(st, f.clo, a)
    if isinstance(f, VNeu):
        dom, cod = as_pi(st, f.ty)
        return VNeu(inst(st, cod, a), f.head, f.spine + (FApp(a, dom),))
    if isinstance(f, VSplit):
        return _distribute(st, f, lambda s, g: do_app(s, g, a))
    if isinstance(f, VAbort):
        return f
    raise KernelFault(f"cannot apply {type(f).__name__}")


def do_fst(st, p: Value) -> Value:
    if isinstance(p, VPair):
        return p.fst
    if isinstance(p, VNeu):
        dom, _ = as_sg(st, p.ty)
        return VNeu(dom, p.head, p.spine + (FFst(),))
    if isinstance(p, VSplit):
        return _distribute(st, p, do_fst)
    if isinstance(p, VAbort):
        return p
    raise KernelFault(f"cannot project from {type(p).__name__}")


def do_snd(st, p: Value) -> Value:
    if isinstance(p, VPair):
        return p.snd
    if isinstance(p, VNeu):
        _, cod = as_sg(st, p.ty)
        return VNeu(inst(st, cod, do_fst(st, p)), p.head, p.spine + (FSnd(),))
    if isinstance(p, VSplit):
        return _distribute(st, p, do_snd)
    if isinstance(p, VAbort):
        return p
    raise KernelFault(f"cannot project from {type(p).__name__}")


def do_dapp(st, p: Value, r) -> Value:
    """Apply a path to a dimension, honouring the boundary of its type."""
    r = canonical_dim(st, r)
    if isinstance(p, VDLam):
        return inst_d(st, p.clo, r)
    if isinstance(p, VNeu):
        line, left, right = as_path(st, p.ty)
        if entails(st, Eq(r, ZERO)):
            return left
        if entails(st, Eq(r, ONE)):
            return right
        if not isinstance(r, DimConst):
            ends = [
                (Eq(r, ZERO), lambda s: left),
                (Eq(r, ONE), lambda s: right),
            ]
            # under a disjunction the boundary may hold in every branch
            if entails(st, boundary(r)):
                return mk_split(st, ends)
        return VNeu(inst_d(st, line, r), p.head, p.spine + (FDApp(r),))
    if isinstance(p, VSplit):
        return _distribute(st, p, lambda s, q: do_dapp(s, q, r))
    if isinstance(p, VAbort):
        return p
    raise KernelFault(f"cannot apply {type(p).__name__} to a dimension")


def do_if(st, motive, b: Value, on_tt: Value, on_ff: Value) -> Value:
    if isinstance(b, VTt):
        return on_tt
    if isinstance(b, VFf):
        return on_ff
    if isinstance(b, VNeu):
        return VNeu(inst(st, motive, b), b.head, b.spine + (FIf(motive, on_tt, on_ff),))
    if isinstance(b, VSplit):
        return _distribute(st, b, lambda s, c: do_if(s, motive, c, on_tt, on_ff))
    if isinstance(b, VAbort):
        return b
    raise KernelFault(f"if on {type(b).__name__}")


def do_el(st, code: Value) -> Value:
    """Decode a code into the type it names."""
    if isinstance(code, VCodePi):
        cod = code.cod
        return VPi(do_el(st, code.dom), HClo(lambda s, x: do_el(s, inst(s, cod, x)), cod.hint))
    if isinstance(code, VCodeSg):
        cod = code.cod
        return VSg(do_el(st, code.dom), HClo(lambda s, x: do_el(s, inst(s, cod, x)), cod.hint))
    if isinstance(code, VCodePath):
        line = code.line
        return VPath(
            HDClo(lambda s, i: do_el(s, inst_d(s, line, i)), line.hint), code.left, code.right
        )
    if isinstance(code, VCodeBool):
        return VBool()
    if isinstance(code, VNeu):
        return VEl(code)
    if isinstance(code, VSplit):
        return _distribute(st, code, do_el)
    if isinstance(code, VAbort):
        return code
    raise KernelFault(f"El of non-code {type(code).__name__}")


def do_typecase(st, motive, code: Value, on_pi, on_sg, on_path, on_bool) -> Value:
    if isinstance(code, VCodePi):
        return inst(st, on_pi, code.dom, VLam(code.cod))
    if isinstance(code, VCodeSg):
        return inst(st, on_sg, code.dom, VLam(code.cod))
    if isinstance(code, VCodePath):
        line = code.line
        return inst(
            st,
            on_path,
            inst_d(st, line, ZERO),
            inst_d(st, line, ONE),
            VDLam(line),
            code.left,
            code.right,
        )
    if isinstance(code, VCodeBool):
        return inst(st, on_bool)
    if isinstance(code, VNeu):
        frame = FTypeCase(motive, on_pi, on_sg, on_path, on_bool)
        return VNeu(inst(st, motive, code), code.head, code.spine + (frame,))
    if isinstance(code, VSplit):
        return _distribute(
            st, code, lambda s, c: do_typecase(s, motive, c, on_pi, on_sg, on_path, on_bool)
        )
    if isinstance(code, VAbort):
        return code
    raise KernelFault(f"typecase on non-code {type(code).__name__}")


# -- code projections through typecase ----------------------------------------
#
# A neutral code is taken apart by typecase with fixed motives. Non-matching
# branches return harmless defaults so every projection is total.

_U = VUniv()
_MOT_U = const_clo(_U)
_BOOL_CODE = VCodeBool()
_CONST_BOOL_FAM = VLam(const_clo(_BOOL_CODE))


def fam_dom(st, code: Value) -> Value:
    return do_typecase(
        st,
        _MOT_U,
        code,
        HClo(lambda s, u, v: u),
        HClo(lambda s, u, v: u),
        HClo(lambda s, u0, u1, up, x0, x1: _BOOL_CODE),
        const_clo(_BOOL_CODE),
    )


def fam_cod(st, code: Value) -> Value:
    motive = HClo(lambda s, u: VPi(do_el(s, fam_dom(s, u)), _MOT_U))
    return do_typecase(
        st,
        motive,
        code,
        HClo(lambda s, u, v: v),
        HClo(lambda s, u, v: v),
        HClo(lambda s, u0, u1, up, x0, x1: _CONST_BOOL_FAM),
        const_clo(_CONST_BOOL_FAM),
    )


def path_src(st, code: Value) -> Value:
    return do_typecase(
        st,
        _MOT_U,
        code,
        HClo(lambda s, u, v: _BOOL_CODE),
        HClo(lambda s, u, v: _BOOL_CODE),
        HClo(lambda s, u0, u1, up, x0, x1: u0),
        const_clo(_BOOL_CODE),
    )


def path_dst(st, code: Value) -> Value:
    return do_typecase(
        st,
        _MOT_U,
        code,
        HClo(lambda s, u, v: _BOOL_CODE),
        HClo(lambda s, u, v: _BOOL_CODE),
        HClo(lambda s, u0, u1, up, x0, x1: u1),
        const_clo(_BOOL_CODE),
    )


_REFL_BOOL_CODE = VDLam(const_dclo(_BOOL_CODE))


def path_line(st, code: Value) -> Value:
    motive = HClo(
        lambda s, u: VPath(const_dclo(_U), path_src(s, u), path_dst(s, u))
    )
    return do_typecase(
        st,
        motive,
        code,
        HClo(lambda s, u, v: _REFL_BOOL_CODE),
        HClo(lambda s, u, v: _REFL_BOOL_CODE),
        HClo(lambda s, u0, u1, up, x0, x1: up),
        const_clo(_REFL_BOOL_CODE),
    )


def _path_end(st, code: Value, src: bool) -> Value:
    ends = path_src if src else path_dst
    motive = HClo(lambda s, u: do_el(s, ends(s, u)))
    return do_typecase(
        st,
        motive,
        code,
        HClo(lambda s, u, v: VTt()),
        HClo(lambda s, u, v: VTt()),
        HClo(lambda s, u0, u1, up, x0, x1: x0 if src else x1),
        const_clo(VTt()),
    )


def decompose_code(st, code: Value, kind: str):
    """Read a code as the given former, through typecase projections.

    Returns the decoded type: a ``VPi``, ``VSg``, ``VPath`` or ``VBool``.
    Code formers decode directly; neutral codes produce typecase neutrals.
    """
    if kind == "bool":
        return VBool()
    if kind in ("pi", "sg"):
        dom = fam_dom(st, code)
        cod = fam_cod(st, code)
        fam = HClo(lambda s, x: do_el(s, do_app(s, cod, x)))
        return (VPi if kind == "pi" else VSg)(do_el(st, dom), fam)
    if kind == "path":
        line = path_line(st, code)
        return VPath(
            HDClo(lambda s, i: do_el(s, do_dapp(s, line, i))),
            _path_end(st, code, True),
            _path_end(st, code, False),
        )
    raise ValueError(kind)


def as_pi(st, ty: Value):
    if isinstance(ty, VPi):
        return ty.dom, ty.cod
    if isinstance(ty, VEl):
        d = decompose_code(st, ty.code, "pi")
        return d.dom, d.cod
    raise KernelFault(f"expected a function type, got {type(ty).__name__}")


def as_sg(st, ty: Value):
    if isinstance(ty, VSg):
        return ty.dom, ty.cod
    if isinstance(ty, VEl):
        d = decompose_code(st, ty.code, "sg")
        return d.dom, d.cod
    raise KernelFault(f"expected a pair type, got {type(ty).__name__}")


def as_path(st, ty: Value):
    if isinstance(ty, VPath):
        return ty.line, ty.left, ty.right
    if isinstance(ty, VEl):
        d = decompose_code(st, ty.code, "path")
        return d.line, d.left, d.right
    raise KernelFault(f"expected a path type, got {type(ty).__name__}")


# -- Kan operations -----------------------------------------------------------


def _parts(v: Value, cls):
    if isinstance(v, cls):
        return v
    raise KernelFault(f"line changed head: expected {cls.__name__}, got {type(v).__name__}")


def line_is_constant(st, line, i: Sym | None = None) -> bool:
    """Syntactic degeneracy: the line's code at a fresh point does not mention it."""
    if i is None:
        i = Sym.fresh("i")
    code = inst_d(st, line, i)
    return not mentions_dim(quote(st, Scope(open=True), _U, code), i)


def do_coe(st, r, r2, line, a: Value) -> Value:
    r, r2 = canonical_dim(st, r), canonical_dim(st, r2)
    if r == r2 or entails(st, Eq(r, r2)):
        return a
    i = Sym.fresh(getattr(line, "hint", "i"))
    code = inst_d(st, line, i)
    if isinstance(code, VCodeBool):
        return a
    if isinstance(code, VAbort) or isinstance(a, VAbort):
        return VAbort()
    if not mentions_dim(quote(st, Scope(open=True), _U, code), i):
        return a
    if isinstance(code, VCodePi):
        return _coe_pi(st, r, r2, line, a)
    if isinstance(code, VCodeSg):
        return _coe_sg(st, r, r2, line, a)
    if isinstance(code, VCodePath):
        return _coe_path(st, r, r2, line, a)
    if isinstance(code, VNeu):
        if _degenerate_by_endpoints(st, line):
            return a
        ty = do_el(st, inst_d(st, line, r2))
        return VNeu(ty, HCoe(r, r2, line, a))
    if isinstance(code, VSplit):
        if any(i in S.formula_dims(phi) for phi, _ in code.branches):
            raise KernelFault("line splits on its own dimension")
        return VSplit(
            tuple((phi, do_coe(assume(st, phi), r, r2, line, a)) for phi, _ in code.branches)
        )
    raise KernelFault(f"coe along a non-code {type(code).__name__}")


def _degenerate_by_endpoints(st, line) -> bool:
    # With boundary separation at the universe, a line of codes is degenerate
    # exactly when its two endpoints agree.
    from xtt.conversion import Conversion

    return Conversion(max_splits=0).equal_open(
        st, _U, inst_d(st, line, ZERO), inst_d(st, line, ONE)
    )


def _coe_pi(st, r, r2, line, f):
    A = HDClo(lambda s, j: _parts(inst_d(s, line, j), VCodePi).dom)

    def body(s, x):
        fx = do_app(s, f, do_coe(s, r2, r, A, x))

        def cod_at(s2, j):
            B = _parts(inst_d(s2, line, j), VCodePi).cod
            return inst(s2, B, do_coe(s2, r2, j, A, x))

        return do_coe(s, r, r2, HDClo(cod_at), fx)

    return VLam(HClo(body))


def _coe_sg(st, r, r2, line, p):
    A = HDClo(lambda s, j: _parts(inst_d(s, line, j), VCodeSg).dom)
    p1 = do_fst(st, p)

    def cod_at(s, j):
        B = _parts(inst_d(s, line, j), VCodeSg).cod
        return inst(s, B, do_coe(s, r, j, A, p1))

    return VPair(do_coe(st, r, r2, A, p1), do_coe(st, r, r2, HDClo(cod_at), do_snd(st, p)))


def _coe_path(st, r, r2, line, p):
    def at(s, j):
        def code_at(s2, i):
            return inst_d(s2, _parts(inst_d(s2, line, i), VCodePath).line, j)

        def tube(s2, i):
            return mk_split(
                s2,
                [
                    (Eq(i, r), lambda s3: do_dapp(s3, p, j)),
                    (Eq(j, ZERO), lambda s3: _parts(inst_d(s3, line, i), VCodePath).left),
                    (Eq(j, ONE), lambda s3: _parts(inst_d(s3, line, i), VCodePath).right),
                ],
            )

        return do_com(s, r, r2, j, HDClo(code_at), HDClo(tube))

    return VDLam(HDClo(at, getattr(line, "hint", "j")))


def tube_constraint(i, r, s):
    return Or(Eq(i, r), boundary(s))


def do_hcom(st, r, r2, s, code: Value, tube) -> Value:
    r, r2, s = canonical_dim(st, r), canonical_dim(st, r2), canonical_dim(st, s)
    if r == r2 or entails(st, Eq(r, r2)) or entails(st, boundary(s)):
        return inst_d(st, tube, r2)
    if isinstance(code, VCodeBool):
        return inst_d(st, tube, r)
    if isinstance(code, VCodePi):
        cod = code.cod

        def body(s1, x):
            return do_hcom(
                s1,
                r,
                r2,
                s,
                inst(s1, cod, x),
                HDClo(lambda s2, i: do_app(s2, inst_d(s2, tube, i), x)),
            )

        return VLam(HClo(body))
    if isinstance(code, VCodeSg):
        dom, cod = code.dom, code.cod
        fst_tube = HDClo(lambda s1, i: do_fst(s1, inst_d(s1, tube, i)))
        a = do_hcom(st, r, r2, s, dom, fst_tube)
        line = HDClo(lambda s1, i: inst(s1, cod, do_hcom(s1, r, i, s, dom, fst_tube)))
        snd_tube = HDClo(lambda s1, i: do_snd(s1, inst_d(s1, tube, i)))
        return VPair(a, do_com(st, r, r2, s, line, snd_tube))
    if isinstance(code, VCodePath):
        pline, left, right = code.line, code.left, code.right

        def at(s1, j):
            def inner(s2, i):
                return mk_split(
                    s2,
                    [
                        (Eq(i, r), lambda s3: do_dapp(s3, inst_d(s3, tube, i), j)),
                        (Eq(j, ZERO), lambda s3: left),
                        (Eq(j, ONE), lambda s3: right),
                    ],
                )

            return do_hcom(s1, r, r2, j, inst_d(s1, pline, j), HDClo(inner))

        return VDLam(HDClo(at, getattr(pline, "hint", "j")))
    if isinstance(code, VNeu):
        i = Sym.fresh("i")
        here = assume(st, tube_constraint(i, r, s))
        wall = inst_d(here, tube, i)
        if not mentions_dim(quote(here, Scope(open=True), do_el(here, code), wall), i):
            return inst_d(st, tube, r)
        return VNeu(do_el(st, code), HHCom(r, r2, s, code, tube))
    if isinstance(code, VSplit):
        return VSplit(
            tuple(
                (phi, do_hcom(assume(st, phi), r, r2, s, c, tube)) for phi, c in code.branches
            )
        )
    if isinstance(code, VAbort):
        return code
    raise KernelFault(f"hcom at a non-code {type(code).__name__}")


def do_com(st, r, r2, s, line, tube) -> Value:
    """Heterogeneous composition, by coercing the tube to the target fibre."""
    r, r2, s = canonical_dim(st, r), canonical_dim(st, r2), canonical_dim(st, s)
    if r == r2 or entails(st, Eq(r, r2)) or entails(st, boundary(s)):
        return inst_d(st, tube, r2)
    moved = HDClo(lambda s1, i: do_coe(s1, i, r2, line, inst_d(s1, tube, i)))
    return do_hcom(st, r, r2, s, inst_d(st, line, r2), moved)


# -- read-back ----------------------------------------------------------------


@S._term
class FreeVar(S.Term):
    """A variable outside the quotation scope (open read-back only)."""

    sym: Sym


@dataclass(frozen=True)
class Scope:
    """Variables in scope for read-back, outermost first.

    An open scope reads unknown variables back as ``FreeVar`` and unknown
    dimensions as the bare symbol instead of failing.
    """

    terms: tuple = ()
    dims: tuple = ()
    open: bool = False

    def bind(self, sym: Sym) -> Scope:
        return Scope(self.terms + (sym,), self.dims, self.open)

    def bind_dim(self, sym: Sym) -> Scope:
        return Scope(self.terms, self.dims + (sym,), self.open)

    def term_index(self, sym: Sym):
        for k in range(len(self.terms) - 1, -1, -1):
            if self.terms[k] == sym:
                return len(self.terms) - 1 - k
        return None

    def dim_index(self, sym: Sym):
        for k in range(len(self.dims) - 1, -1, -1):
            if self.dims[k] == sym:
                return len(self.dims) - 1 - k
        return None


def mentions_dim(t: S.Term, sym: Sym) -> bool:
    for d in S._dims_of(t):
        if d == sym:
            return True
    return any(mentions_dim(sub, sym) for sub, _, _ in S.children(t))


def quote_dim(st, sc: Scope, r):
    r = canonical_dim(st, r)
    if isinstance(r, DimConst):
        return r
    k = sc.dim_index(r)
    if k is None:
        if sc.open:
            return r
        raise S.ScopeError(f"dimension {r} escapes its scope")
    return DimVar(k)


def quote_formula(st, sc: Scope, phi):
    # formulas are read back verbatim so branch conditions stay visible
    def q(r):
        if isinstance(r, DimConst):
            return r
        k = sc.dim_index(r)
        if k is None:
            if sc.open:
                return r
            raise S.ScopeError(f"dimension {r} escapes its scope")
        return DimVar(k)

    return S.map_formula(phi, q)


def nest_split(branches) -> S.Term:
    branches = list(branches)
    if len(branches) <= 2:
        return S.Split(tuple(branches))
    (phi0, b0), (phi1, b1) = branches[0], branches[1]
    acc_phi, acc = S.Or(phi0, phi1), S.Split(((phi0, b0), (phi1, b1)))
    for phi, body in branches[2:]:
        acc = S.Split(((acc_phi, acc), (phi, body)))
        acc_phi = S.Or(acc_phi, phi)
    return acc


def fresh_var(ty: Value, hint: str = "x"):
    v = var(ty, hint)
    return v, v.head.sym


def _hint(clo, default: str) -> str:
    h = getattr(clo, "hint", default)
    return default if h == "_" else h


def quote(st, sc: Scope, ty: Value, v: Value) -> S.Term:
    if isinstance(v, VAbort) or isinstance(ty, VAbort):
        return S.Abort()
    if isinstance(ty, VPi):
        x, sym = fresh_var(ty.dom, _hint(ty.cod, "x"))
        body = quote(st, sc.bind(sym), inst(st, ty.cod, x), do_app(st, v, x))
        return S.Lam(body, sym.hint)
    if isinstance(ty, VSg):
        a = do_fst(st, v)
        return S.Pair(quote(st, sc, ty.dom, a), quote(st, sc, inst(st, ty.cod, a), do_snd(st, v)))
    if isinstance(ty, VPath):
        i = Sym.fresh(_hint(ty.line, "i"))
        body = quote(st, sc.bind_dim(i), inst_d(st, ty.line, i), do_dapp(st, v, i))
        return S.DLam(body, i.hint)
    if isinstance(ty, VSplit):
        return nest_split(
            (quote_formula(st, sc, phi), quote(assume(st, phi), sc, t, v))
            for phi, t in ty.branches
        )
    if isinstance(v, VSplit):
        return nest_split(
            (quote_formula(st, sc, phi), quote(assume(st, phi), sc, ty, w))
            for phi, w in v.branches
        )
    if isinstance(v, VNeu):
        return quote_neutral(st, sc, v)
    if isinstance(ty, VBool):
        if isinstance(v, VTt):
            return S.Tt()
        if isinstance(v, VFf):
            return S.Ff()
    elif isinstance(ty, VUniv):
        return _quote_code(st, sc, v)
    elif isinstance(ty, VEl):
        if isinstance(v, VTt):
            return S.Tt()
        if isinstance(v, VFf):
            return S.Ff()
        kind = {VLam: "pi", VPair: "sg", VDLam: "path"}.get(type(v))
        if kind is not None:
            return quote(st, sc, decompose_code(st, ty.code, kind), v)
    raise KernelFault(f"cannot read back {type(v).__name__} at {type(ty).__name__}")


def _quote_code(st, sc: Scope, v: Value) -> S.Term:
    if isinstance(v, VCodeBool):
        return S.CodeBool()
    if isinstance(v, (VCodePi, VCodeSg)):
        x, sym = fresh_var(do_el(st, v.dom), getattr(v.cod, "hint", "x"))
        dom = quote(st, sc, _U, v.dom)
        cod = quote(st, sc.bind(sym), _U, inst(st, v.cod, x))
        return (S.CodePi if isinstance(v, VCodePi) else S.CodeSg)(dom, cod, sym.hint)
    if isinstance(v, VCodePath):
        i = Sym.fresh(getattr(v.line, "hint", "i"))
        line = quote(st, sc.bind_dim(i), _U, inst_d(st, v.line, i))
        left = quote(st, sc, do_el(st, inst_d(st, v.line, ZERO)), v.left)
        right = quote(st, sc, do_el(st, inst_d(st, v.line, ONE)), v.right)
        return S.CodePath(line, left, right, i.hint)
    raise KernelFault(f"cannot read back {type(v).__name__} as a code")


def quote_type(st, sc: Scope, ty: Value) -> S.Term:
    if isinstance(ty, VPi) or isinstance(ty, VSg):
        x, sym = fresh_var(ty.dom, _hint(ty.cod, "x"))
        dom = quote_type(st, sc, ty.dom)
        cod = quote_type(st, sc.bind(sym), inst(st, ty.cod, x))
        return (S.Pi if isinstance(ty, VPi) else S.Sg)(dom, cod, sym.hint)
    if isinstance(ty, VPath):
        i = Sym.fresh(_hint(ty.line, "i"))
        line = quote_type(st, sc.bind_dim(i), inst_d(st, ty.line, i))
        left = quote(st, sc, inst_d(st, ty.line, ZERO), ty.left)
        right = quote(st, sc, inst_d(st, ty.line, ONE), ty.right)
        return S.Path(line, left, right, i.hint)
    if isinstance(ty, VBool):
        return S.Bool()
    if isinstance(ty, VUniv):
        return S.Univ()
    if isinstance(ty, VEl):
        return S.El(quote(st, sc, _U, ty.code))
    if isinstance(ty, VSplit):
        return nest_split(
            (quote_formula(st, sc, phi), quote_type(assume(st, phi), sc, t))
            for phi, t in ty.branches
        )
    if isinstance(ty, VAbort):
        return S.Abort()
    raise KernelFault(f"not a type: {type(ty).__name__}")


def _quote_head(st, sc: Scope, h) -> S.Term:
    if isinstance(h, HVar):
        k = sc.term_index(h.sym)
        if k is None:
            if sc.open:
                return FreeVar(h.sym)
            raise S.ScopeError(f"variable {h.sym} escapes its scope")
        return S.Var(k, h.sym.hint)
    if isinstance(h, HCoe):
        i = Sym.fresh(getattr(h.line, "hint", "i"))
        line = quote(st, sc.bind_dim(i), _U, inst_d(st, h.line, i))
        src_ty = do_el(st, inst_d(st, h.line, h.src))
        return S.Coe(
            quote_dim(st, sc, h.src),
            quote_dim(st, sc, h.dst),
            line,
            quote(st, sc, src_ty, h.arg),
            i.hint,
        )
    if isinstance(h, HHCom):
        i = Sym.fresh("i")
        code = quote(st, sc, _U, h.code)
        here = assume(st, tube_constraint(i, h.src, h.wall))
        tube = quote(here, sc.bind_dim(i), do_el(here, h.code), inst_d(here, h.tube, i))
        return S.Com(
            quote_dim(st, sc, h.src),
            quote_dim(st, sc, h.dst),
            quote_dim(st, sc, h.wall),
            S.shift(code, dims=1),
            tube,
            i.hint,
        )
    raise KernelFault(f"unknown head {type(h).__name__}")


def quote_neutral(st, sc: Scope, n: VNeu) -> S.Term:
    acc = _quote_head(st, sc, n.head)
    for frame in n.spine:
        if isinstance(frame, FApp):
            acc = S.App(acc, quote(st, sc, frame.arg_ty, frame.arg))
        elif isinstance(frame, FFst):
            acc = S.Fst(acc)
        elif isinstance(frame, FSnd):
            acc = S.Snd(acc)
        elif isinstance(frame, FDApp):
            acc = S.DApp(acc, quote_dim(st, sc, frame.dim))
        elif isinstance(frame, FIf):
            acc = _quote_if(st, sc, frame, acc)
        elif isinstance(frame, FTypeCase):
            acc = _quote_typecase(st, sc, frame, acc)
        else:
            raise KernelFault(f"unknown frame {type(frame).__name__}")
    return acc


def _quote_motive(st, sc: Scope, motive, dom: Value, hint: str) -> S.Term:
    x, sym = fresh_var(dom, hint)
    return quote_type(st, sc.bind(sym), inst(st, motive, x))


def _quote_if(st, sc: Scope, frame: FIf, scrut: S.Term) -> S.Term:
    return S.If(
        _quote_motive(st, sc, frame.motive, VBool(), "x"),
        scrut,
        quote(st, sc, inst(st, frame.motive, VTt()), frame.on_tt),
        quote(st, sc, inst(st, frame.motive, VFf()), frame.on_ff),
    )


def typecase_binders(st):
    """Fresh variables for the pi/sg branch and the path branch, with their types."""
    u, su = fresh_var(_U, "u")
    v, sv = fresh_var(VPi(do_el(st, u), _MOT_U), "v")
    u0, s0 = fresh_var(_U, "u0")
    u1, s1 = fresh_var(_U, "u1")
    up, sp = fresh_var(VPath(const_dclo(_U), u0, u1), "up")
    x0, sx0 = fresh_var(do_el(st, u0), "x0")
    x1, sx1 = fresh_var(do_el(st, u1), "x1")
    return (u, v), (su, sv), (u0, u1, up, x0, x1), (s0, s1, sp, sx0, sx1)


def _quote_typecase(st, sc: Scope, frame: FTypeCase, scrut: S.Term) -> S.Term:
    motive = _quote_motive(st, sc, frame.motive, _U, "u")
    branches = []
    for kind, clo in (("pi", frame.on_pi), ("sg", frame.on_sg)):
        (u, v), (su, sv), _, _ = typecase_binders(st)
        code_cls = VCodePi if kind == "pi" else VCodeSg
        code = code_cls(u, HClo(lambda s, x, v=v: do_app(s, v, x)))
        target = inst(st, frame.motive, code)
        branches.append(quote(st, sc.bind(su).bind(sv), target, inst(st, clo, u, v)))
    _, _, args, syms = typecase_binders(st)
    u0, u1, up, x0, x1 = args
    code = VCodePath(HDClo(lambda s, i: do_dapp(s, up, i)), x0, x1)
    inner = sc
    for sym in syms:
        inner = inner.bind(sym)
    branches.append(quote(st, inner, inst(st, frame.motive, code), inst(st, frame.on_path, *args)))
    branches.append(quote(st, sc, inst(st, frame.motive, VCodeBool()), inst(st, frame.on_bool)))
    return S.TypeCase(motive, scrut, *branches)


# -- convenience --------------------------------------------------------------


def normalize(st, sc: Scope, env: Env, ty: Value, t: S.Term) -> S.Term:
    return quote(st, sc, ty, eval_term(st, env, t))
