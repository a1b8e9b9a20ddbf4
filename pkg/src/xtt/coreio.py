"""A parenthesised prefix notation for core terms.

Every term is ``(tag hint ... field ...)``: binder hints, then the fields in
schema order. Nullary terms are bare tags. Variables are de Bruijn indices;
binder names are carried along as display hints only. Dimensions are ``0``, ``1`` or
``(dim k)``; formulas are ``(= r s)`` and ``(or phi psi)``; split branches
are ``(branches (phi body) ...)``.

    (lam x (app (var 0 x) tt))
    (coe i 0 1 code-bool tt)
    (dlam i (split (branches ((= (dim 0) 0) tt) ((= (dim 0) 1) ff))))
"""

from __future__ import annotations

import re
from dataclasses import fields

from xtt import syntax as S
from xtt.syntax import DimConst, DimVar, Eq, Or

TAGS = {
    S.Var: "var",
    S.Ref: "ref",
    S.Lam: "lam",
    S.App: "app",
    S.Pair: "pair",
    S.Fst: "fst",
    S.Snd: "snd",
    S.DLam: "dlam",
    S.DApp: "dapp",
    S.Tt: "tt",
    S.Ff: "ff",
    S.If: "if",
    S.Abort: "abort",
    S.Split: "split",
    S.Coe: "coe",
    S.Com: "com",
    S.Pi: "pi",
    S.Sg: "sg",
    S.Path: "path",
    S.Bool: "bool",
    S.Univ: "U",
    S.El: "El",
    S.CodePi: "code-pi",
    S.CodeSg: "code-sg",
    S.CodePath: "code-path",
    S.CodeBool: "code-bool",
    S.TypeCase: "typecase",
}
CLASSES = {tag: cls for cls, tag in TAGS.items()}


class CoreSyntaxError(ValueError):
    pass


def _fields(cls):
    """Fields in emission order: binder hints first, then the schema."""
    fs = fields(cls)
    if cls in (S.Var, S.Ref):
        return fs
    hints = [f for f in fs if f.name in ("name", "names")]
    return hints + [f for f in fs if f.name not in ("name", "names")]


# -- emission -----------------------------------------------------------------


def emit_dim(r) -> str:
    match r:
        case DimConst(v):
            return str(v)
        case DimVar(k):
            return f"(dim {k})"
    raise CoreSyntaxError(f"cannot emit dimension {r!r}")


def emit_formula(phi) -> str:
    match phi:
        case Eq(a, b):
            return f"(= {emit_dim(a)} {emit_dim(b)})"
        case Or(a, b):
            return f"(or {emit_formula(a)} {emit_formula(b)})"
    raise CoreSyntaxError(f"cannot emit formula {phi!r}")


def _hint(name: str) -> str:
    return name if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name or "") else "_"


def emit(t: S.Term) -> str:
    tag = TAGS.get(type(t))
    if tag is None:
        raise CoreSyntaxError(f"cannot emit {type(t).__name__}")
    kinds = {name: kind for name, kind, _, _ in t.SCHEMA}
    parts = [tag]
    for f in _fields(type(t)):
        v = getattr(t, f.name)
        kind = kinds.get(f.name)
        if kind == "tm":
            parts.append(emit(v))
        elif kind == "dim":
            parts.append(emit_dim(v))
        elif kind == "br":
            brs = " ".join(f"({emit_formula(phi)} {emit(b)})" for phi, b in v)
            parts.append(f"(branches {brs})")
        elif f.name == "names":
            parts.append("(names" + "".join(" " + _hint(n) for n in v) + ")")
        elif isinstance(v, int):
            parts.append(str(v))
        else:
            parts.append(v if tag == "ref" else _hint(v))
    return parts[0] if len(parts) == 1 else "(" + " ".join(parts) + ")"


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def read_sexp(text: str):
    """Parse one s-expression into nested lists of atom strings."""
    pos = 0
    stack: list[list] = [[]]
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise CoreSyntaxError(f"unbalanced ')' at offset {m.start(2)}")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(m.group(3))
    if text[pos:].strip():
        raise CoreSyntaxError(f"unexpected input at offset {pos}")
    if len(stack) != 1:
        raise CoreSyntaxError("unbalanced '('")
    if len(stack[0]) != 1:
        raise CoreSyntaxError("expected exactly one expression")
    return stack[0][0]


def _dim(x):
    match x:
        case "0" | "1":
            return DimConst(int(x))
        case ["dim", k]:
            return DimVar(int(k))
    raise CoreSyntaxError(f"bad dimension {x!r}")


def _formula(x):
    match x:
        case ["=", a, b]:
            return Eq(_dim(a), _dim(b))
        case ["or", a, b]:
            return Or(_formula(a), _formula(b))
    raise CoreSyntaxError(f"bad formula {x!r}")


def from_sexp(x) -> S.Term:
    if isinstance(x, str):
        tag, args = x, []
    elif x and isinstance(x[0], str):
        tag, args = x[0], x[1:]
    else:
        raise CoreSyntaxError(f"bad term {x!r}")
    cls = CLASSES.get(tag)
    if cls is None:
        raise CoreSyntaxError(f"unknown tag {tag!r}")
    kinds = {name: kind for name, kind, _, _ in cls.SCHEMA}
    fs = _fields(cls)
    if len(args) != len(fs):
        raise CoreSyntaxError(f"{tag} takes {len(fs)} fields, got {len(args)}")
    vals = {}
    for f, a in zip(fs, args):
        kind = kinds.get(f.name)
        if kind == "tm":
            vals[f.name] = from_sexp(a)
        elif kind == "dim":
            vals[f.name] = _dim(a)
        elif kind == "br":
            if not (isinstance(a, list) and a and a[0] == "branches"):
                raise CoreSyntaxError(f"bad branches {a!r}")
            vals[f.name] = tuple((_formula(phi), from_sexp(b)) for phi, b in a[1:])
        elif f.name == "names":
            vals[f.name] = tuple(a[1:])
        elif f.type in (int, "int"):
            vals[f.name] = int(a)
        else:
            vals[f.name] = a
    try:
        return cls(**vals)
    except (S.ScopeError, TypeError) as exc:
        raise CoreSyntaxError(str(exc)) from None


def parse_core(text: str) -> S.Term:
    return from_sexp(read_sexp(text))
