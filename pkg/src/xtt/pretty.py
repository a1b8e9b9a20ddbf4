"""Printing core terms in the ASCII surface syntax.

The output re-parses: binder names are freshened against everything in
scope, against referenced definitions and against keywords, and every
keyword argument that is not atomic is parenthesised.
"""

from __future__ import annotations

from xtt import syntax as S
from xtt.syntax import DimConst, DimVar, Eq, Or, Sym

KEYWORDS = frozenset(
    "U bool tt ff path if abort coe com hcom El pi^ sg^ path^ bool^ tycase "
    "dd def expect pi sg".split()
)

# precedence levels
TOP, ARROW, TIMES, AT, APP, ATOM = range(6)


def _refs(t: S.Term, out: set):
    if isinstance(t, S.Ref):
        out.add(t.name)
    for sub, _, _ in S.children(t):
        _refs(sub, out)
    return out


class Printer:
    def __init__(self, reserved=()):
        self.reserved = set(reserved) | KEYWORDS

    def fresh(self, hint: str, taken) -> str:
        base = hint if hint and hint[0].isalpha() and hint not in ("_",) else "x"
        base = base.rstrip("'") or "x"
        if base not in taken and base not in self.reserved:
            return base
        n = 1
        while f"{base}{n}" in taken or f"{base}{n}" in self.reserved:
            n += 1
        return f"{base}{n}"

    # -- dimensions and formulas --

    def dim(self, r, dnames) -> str:
        if isinstance(r, DimConst):
            return str(r.value)
        if isinstance(r, DimVar):
            k = len(dnames) - 1 - r.index
            if 0 <= k < len(dnames):
                return dnames[k]
            return f"?d{r.index}"
        if isinstance(r, Sym):
            return str(r)
        return str(r)

    def formula(self, phi, dnames) -> str:
        match phi:
            case Or(Eq(a, DimConst(0)), Eq(b, DimConst(1))) if a == b and not isinstance(
                a, DimConst
            ):
                return f"dd {self.dim(a, dnames)}"
            case Eq(a, b):
                return f"{self.dim(a, dnames)} = {self.dim(b, dnames)}"
            case Or(l, r):
                right = self.formula(r, dnames)
                if isinstance(r, Or) and not right.startswith("dd "):
                    right = f"({right})"
                return f"{self.formula(l, dnames)} \\/ {right}"
        raise TypeError(phi)

    # -- terms --

    def term(self, t: S.Term, names: list, dnames: list, prec: int = TOP) -> str:
        text, level = self._go(t, names, dnames)
        return text if level >= prec else f"({text})"

    def _taken(self, names, dnames):
        return set(names) | set(dnames)

    def _bind(self, hint, names, dnames):
        x = self.fresh(hint, self._taken(names, dnames))
        return x, names + [x]

    def _bind_dim(self, hint, names, dnames):
        i = self.fresh(hint, self._taken(names, dnames))
        return i, dnames + [i]

    def atom(self, t, names, dnames):
        return self.term(t, names, dnames, ATOM)

    def _go(self, t: S.Term, names: list, dnames: list):
        p = self.term
        a = self.atom
        match t:
            case S.Var(index=k):
                j = len(names) - 1 - k
                return (names[j] if 0 <= j < len(names) else f"?{k}"), ATOM
            case S.Ref(name=n):
                return n, ATOM
            case S.Lam():
                xs = []
                body = t
                while isinstance(body, S.Lam):
                    x, names = self._bind(body.name, names, dnames)
                    xs.append(x)
                    body = body.body
                return f"\\{' '.join(xs)}. {p(body, names, dnames)}", TOP
            case S.App(fn, arg):
                return f"{p(fn, names, dnames, APP)} {a(arg, names, dnames)}", APP
            case S.Pair(x, y):
                return f"({p(x, names, dnames)}, {p(y, names, dnames)})", ATOM
            case S.Fst(e):
                return f"{a(e, names, dnames)}.1", ATOM
            case S.Snd(e):
                return f"{a(e, names, dnames)}.2", ATOM
            case S.DLam(body, name):
                i, dn = self._bind_dim(name, names, dnames)
                return f"<{i}> {p(body, names, dn)}", TOP
            case S.DApp(e, r):
                return f"{p(e, names, dnames, APP)} @ {self.dim(r, dnames)}", AT
            case S.Tt():
                return "tt", ATOM
            case S.Ff():
                return "ff", ATOM
            case S.If(motive, scrut, on_tt, on_ff, name):
                x, inner = self._bind(name, names, dnames)
                return (
                    f"if ({x}. {p(motive, inner, dnames)}) {a(scrut, names, dnames)} "
                    f"{a(on_tt, names, dnames)} {a(on_ff, names, dnames)}",
                    APP,
                )
            case S.Abort():
                return "abort", ATOM
            case S.Split():
                parts = [
                    f"{self.formula(phi, dnames)} -> {p(body, names, dnames)}"
                    for phi, body in _flatten_split(t)
                ]
                return "[ " + " | ".join(parts) + " ]", ATOM
            case S.Coe(r, r2, line, arg, name):
                i, dn = self._bind_dim(name, names, dnames)
                return (
                    f"coe {self.dim(r, dnames)} {self.dim(r2, dnames)} "
                    f"({i}. {p(line, names, dn)}) {a(arg, names, dnames)}",
                    APP,
                )
            case S.Com(r, r2, s, line, tube, name):
                i, dn = self._bind_dim(name, names, dnames)
                head = f"{self.dim(r, dnames)} {self.dim(r2, dnames)} {self.dim(s, dnames)}"
                if 0 not in S.free_dimensions(line):
                    code = S.instantiate_dim(line, ZERO_PLACEHOLDER)
                    return (
                        f"hcom {head} {a(code, names, dnames)} ({i}. {p(tube, names, dn)})",
                        APP,
                    )
                return (
                    f"com {head} ({i}. {p(line, names, dn)}) ({i}. {p(tube, names, dn)})",
                    APP,
                )
            case S.Pi(dom, cod, name) | S.Sg(dom, cod, name):
                op, lvl = ("->", ARROW) if isinstance(t, S.Pi) else ("*", TIMES)
                if 0 not in S.free_vars(cod)[0]:
                    body = S.instantiate(cod, S.Tt())
                    left = p(dom, names, dnames, lvl + 1)
                    return f"{left} {op} {p(body, names, dnames, lvl)}", lvl
                x, inner = self._bind(name, names, dnames)
                return (
                    f"({x} : {p(dom, names, dnames)}) {op} {p(cod, inner, dnames, lvl)}",
                    lvl,
                )
            case S.Path(line, left, right, name):
                i, dn = self._bind_dim(name, names, dnames)
                return (
                    f"path ({i}. {p(line, names, dn)}) {a(left, names, dnames)} "
                    f"{a(right, names, dnames)}",
                    APP,
                )
            case S.Bool():
                return "bool", ATOM
            case S.Univ():
                return "U", ATOM
            case S.El(code):
                return f"El {a(code, names, dnames)}", APP
            case S.CodePi(dom, cod, name) | S.CodeSg(dom, cod, name):
                kw = "pi^" if isinstance(t, S.CodePi) else "sg^"
                x, inner = self._bind(name, names, dnames)
                return f"{kw} {a(dom, names, dnames)} ({x}. {p(cod, inner, dnames)})", APP
            case S.CodePath(line, left, right, name):
                i, dn = self._bind_dim(name, names, dnames)
                return (
                    f"path^ ({i}. {p(line, names, dn)}) {a(left, names, dnames)} "
                    f"{a(right, names, dnames)}",
                    APP,
                )
            case S.CodeBool():
                return "bool^", ATOM
            case S.TypeCase(motive, scrut, on_pi, on_sg, on_path, on_bool, hints):
                hints = tuple(hints) + ("x", "u", "v", "u", "v", "u0", "u1", "up", "x0", "x1")
                x, inner = self._bind(hints[0] if hints[0] else "x", names, dnames)
                arms = []
                for kw, body, arity, hs in (
                    ("pi", on_pi, 2, ("u", "v")),
                    ("sg", on_sg, 2, ("u", "v")),
                    ("path", on_path, 5, ("u0", "u1", "up", "x0", "x1")),
                ):
                    bound = names
                    vs = []
                    for h in hs[:arity]:
                        v, bound = self._bind(h, bound, dnames)
                        vs.append(v)
                    arms.append(f"{kw} {' '.join(vs)} -> {p(body, bound, dnames)}")
                arms.append(f"bool -> {p(on_bool, names, dnames)}")
                return (
                    f"tycase ({x}. {p(motive, inner, dnames)}) {a(scrut, names, dnames)} "
                    "{ " + " | ".join(arms) + " }",
                    APP,
                )
        sym = getattr(t, "sym", None)
        if sym is not None:
            return f"?{sym}", ATOM
        raise TypeError(f"cannot print {type(t).__name__}")


ZERO_PLACEHOLDER = S.ZERO


def _flatten_split(t: S.Split):
    """Undo left-nested binary splits whose outer formula is the inner disjunction."""
    out = []
    for n, (phi, body) in enumerate(t.branches):
        if n == 0 and isinstance(body, S.Split) and len(t.branches) == 2 and phi == _disj(body):
            out.extend(_flatten_split(body))
        else:
            out.append((phi, body))
    return out


def _disj(t: S.Split):
    return S.disjoin([phi for phi, _ in t.branches])


def show(t: S.Term, names=None, dnames=None) -> str:
    names = list(names or [])
    dnames = list(dnames or [])
    printer = Printer(_refs(t, set()))
    return printer.term(t, names, dnames)
