"""Surface syntax: tokens, the named AST, and a recursive-descent parser.

Precedence from loosest to tightest: binders (``\\x. e``, ``<i> e``), ``->``
(right associative), ``*`` (right associative), ``@``, application, and the
postfix projections ``.1`` / ``.2``. Keyword forms such as ``coe`` take a
fixed number of atomic arguments and may then be applied like any head.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class ParseError(Exception):
    def __init__(self, message: str, span=(0, 0)):
        super().__init__(message)
        self.message = message
        self.span = span


# -- tokens -------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def span(self):
        return (self.line, self.col)


_SYMBOLS = [
    ("->", "->"),
    ("→", "->"),
    ("\\/", "\\/"),
    ("∨", "\\/"),
    ("λ", "\\"),
    ("\\", "\\"),
    ("⟨", "<"),
    ("⟩", ">"),
    ("×", "*"),
    ("∂", "dd"),
    ("(", "("),
    (")", ")"),
    ("[", "["),
    ("]", "]"),
    ("{", "{"),
    ("}", "}"),
    (",", ","),
    (":", ":"),
    ("=", "="),
    ("|", "|"),
    ("<", "<"),
    (">", ">"),
    ("@", "@"),
    ("*", "*"),
]

_IDENT = re.compile(r"[^\W\d][\w']*\^?")
_DIRECTIVE = re.compile(r"#[a-z]+")
_NUMBER = re.compile(r"\d+")
_CODE = re.compile(r"E\d{3}")

KEYWORDS = {
    "def",
    "expect",
    "U",
    "bool",
    "bool^",
    "tt",
    "ff",
    "abort",
    "refl",
    "if",
    "coe",
    "com",
    "hcom",
    "path",
    "path^",
    "pi^",
    "sg^",
    "El",
    "tycase",
    "dd",
}


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    pos, line, col = 0, 1, 1
    n = len(src)
    while pos < n:
        c = src[pos]
        if c == "\n":
            pos, line, col = pos + 1, line + 1, 1
            continue
        if c.isspace():
            pos, col = pos + 1, col + 1
            continue
        if src.startswith("--", pos):
            while pos < n and src[pos] != "\n":
                pos += 1
            continue
        if c == "." and pos + 1 < n and src[pos + 1] in "12":
            after = src[pos + 2] if pos + 2 < n else " "
            if not (after.isalnum() or after == "_"):
                toks.append(Token("proj", src[pos + 1], line, col))
                pos, col = pos + 2, col + 2
                continue
        if c == ".":
            toks.append(Token(".", ".", line, col))
            pos, col = pos + 1, col + 1
            continue
        for text, kind in _SYMBOLS:
            if src.startswith(text, pos):
                toks.append(Token(kind, text, line, col))
                pos, col = pos + len(text), col + len(text)
                break
        else:
            m = _DIRECTIVE.match(src, pos)
            if m:
                toks.append(Token("directive", m.group(), line, col))
            else:
                m = _NUMBER.match(src, pos)
                if m:
                    toks.append(Token("num", m.group(), line, col))
                else:
                    m = _IDENT.match(src, pos)
                    if not m:
                        raise ParseError(f"unexpected character {c!r}", (line, col))
                    text = m.group()
                    kind = "kw" if text in KEYWORDS else "ident"
                    if text == "_":
                        kind = "_"
                    toks.append(Token(kind, text, line, col))
            length = len(m.group())
            pos, col = pos + length, col + length
    toks.append(Token("eof", "", line, col))
    return toks


# -- AST ----------------------------------------------------------------------


def _node(cls):
    return dataclass(frozen=True)(cls)


@_node
class Node:
    span: tuple = field(default=(0, 0), compare=False, kw_only=True)


# dimensions and formulas


@_node
class SDim(Node):
    value: str  # "0", "1" or a name


@_node
class SEq(Node):
    lhs: SDim
    rhs: SDim


@_node
class SOr(Node):
    left: Node
    right: Node


@_node
class SBoundary(Node):
    dim: SDim


# terms


@_node
class SVar(Node):
    name: str


@_node
class SUniv(Node):
    pass


@_node
class SBool(Node):
    pass


@_node
class SBoolCode(Node):
    pass


@_node
class STt(Node):
    pass


@_node
class SFf(Node):
    pass


@_node
class SAbort(Node):
    pass


@_node
class SRefl(Node):
    pass


@_node
class SLam(Node):
    names: tuple
    body: Node


@_node
class SApp(Node):
    fn: Node
    arg: Node


@_node
class SPair(Node):
    fst: Node
    snd: Node


@_node
class SProj(Node):
    expr: Node
    which: int


@_node
class SDLam(Node):
    names: tuple
    body: Node


@_node
class SDApp(Node):
    expr: Node
    dim: SDim


@_node
class SPi(Node):
    name: str | None
    dom: Node
    cod: Node


@_node
class SSg(Node):
    name: str | None
    dom: Node
    cod: Node


@_node
class SPath(Node):
    binder: str
    line: Node
    left: Node
    right: Node


@_node
class SIf(Node):
    binder: str
    motive: Node
    scrut: Node
    on_tt: Node
    on_ff: Node


@_node
class SSplit(Node):
    branches: tuple  # of (formula, term)


@_node
class SCoe(Node):
    src: SDim
    dst: SDim
    binder: str
    line: Node
    arg: Node


@_node
class SCom(Node):
    src: SDim
    dst: SDim
    wall: SDim
    binder: str
    line: Node
    tube_binder: str
    tube: Node


@_node
class SHCom(Node):
    src: SDim
    dst: SDim
    wall: SDim
    code: Node
    tube_binder: str
    tube: Node


@_node
class SCodePi(Node):
    dom: Node
    binder: str
    cod: Node


@_node
class SCodeSg(Node):
    dom: Node
    binder: str
    cod: Node


@_node
class SCodePath(Node):
    binder: str
    line: Node
    left: Node
    right: Node


@_node
class SEl(Node):
    code: Node


@_node
class STyCase(Node):
    binder: str
    motive: Node
    scrut: Node
    arms: tuple  # (kind, names, body) for pi, sg, path, bool in that order


@_node
class SAnn(Node):
    expr: Node
    ty: Node


# declarations


@dataclass
class Decl:
    kind: str  # "def", "check", "normalize", "fail"
    span: tuple
    name: str = ""
    ty: Node | None = None
    body: Node | None = None
    expect: Node | None = None
    inner: Decl | None = None
    code: str | None = None  # expected error code of a #fail

    @property
    def label(self) -> str:
        if self.kind == "def":
            return self.name
        if self.kind == "fail":
            return f"#fail {self.inner.label}"
        return f"#{self.kind}@{self.span[0]}"


# -- parser -------------------------------------------------------------------

_TYCASE_ARITY = {"pi": 2, "sg": 2, "path": 5, "bool": 0}


class Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.pos = 0

    # token plumbing

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            want = text or kind
            got = self.tok.text or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", self.tok.span)
        return self.advance()

    def fail(self, message: str):
        raise ParseError(message, self.tok.span)

    # declarations

    def declarations(self) -> list[Decl]:
        out = []
        while not self.at("eof"):
            out.append(self.declaration())
        return out

    def declaration(self) -> Decl:
        t = self.tok
        if self.at("kw", "def"):
            self.advance()
            name = self.binder_name()
            self.expect(":")
            ty = self.expr()
            self.expect("=")
            return Decl("def", t.span, name=name, ty=ty, body=self.expr())
        if self.at("directive", "#check"):
            self.advance()
            body = self.expr()
            self.expect(":")
            return Decl("check", t.span, body=body, ty=self.expr())
        if self.at("directive", "#normalize"):
            self.advance()
            body = self.expr()
            self.expect(":")
            ty = self.expr()
            self.expect("kw", "expect")
            return Decl("normalize", t.span, body=body, ty=ty, expect=self.expr())
        if self.at("directive", "#fail"):
            self.advance()
            code = None
            if self.at("ident") and _CODE.fullmatch(self.tok.text):
                code = self.advance().text
            return Decl("fail", t.span, inner=self.declaration(), code=code)
        self.fail("expected a declaration (def, #check, #normalize or #fail)")

    # names and dimensions

    def binder_name(self) -> str:
        if self.at("ident"):
            return self.advance().text
        if self.at("_"):
            self.advance()
            return "_"
        self.fail(f"expected a name, found {self.tok.text or 'end of input'!r}")

    def dim(self) -> SDim:
        t = self.tok
        if self.at("num"):
            if t.text not in ("0", "1"):
                self.fail("a dimension constant is 0 or 1")
            self.advance()
            return SDim(t.text, span=t.span)
        if self.at("ident"):
            self.advance()
            return SDim(t.text, span=t.span)
        self.fail(f"expected a dimension, found {t.text or 'end of input'!r}")

    def formula(self) -> Node:
        left = self.formula_atom()
        while self.at("\\/"):
            t = self.advance()
            left = SOr(left, self.formula_atom(), span=t.span)
        return left

    def formula_atom(self) -> Node:
        t = self.tok
        if self.at("kw", "dd") or self.at("dd"):
            self.advance()
            return SBoundary(self.dim(), span=t.span)
        if self.at("("):
            self.advance()
            phi = self.formula()
            self.expect(")")
            return phi
        lhs = self.dim()
        self.expect("=")
        return SEq(lhs, self.dim(), span=t.span)

    # expressions

    def expr(self) -> Node:
        t = self.tok
        if self.at("\\"):
            self.advance()
            names = [self.binder_name()]
            while not self.at("."):
                names.append(self.binder_name())
            self.expect(".")
            return SLam(tuple(names), self.expr(), span=t.span)
        if self.at("<"):
            self.advance()
            names = [self.binder_name()]
            while not self.at(">"):
                names.append(self.binder_name())
            self.expect(">")
            return SDLam(tuple(names), self.expr(), span=t.span)
        return self.arrow()

    def telescope(self):
        """Try to read ``(x y : A) (z : B) ...`` followed by ``->`` or ``*``."""
        start = self.pos
        groups = []
        while self.at("(") and self.peek().kind in ("ident", "_"):
            save = self.pos
            self.advance()
            names = []
            while self.at("ident") or self.at("_"):
                names.append(self.advance().text)
            if not self.at(":"):
                self.pos = save
                break
            self.advance()
            try:
                ty = self.expr()
                self.expect(")")
            except ParseError:
                self.pos = start
                return None
            groups.append((names, ty))
        if groups and (self.at("->") or self.at("*")):
            return groups
        self.pos = start
        return None

    def arrow(self) -> Node:
        t = self.tok
        left = self.times()
        if self.at("->"):
            self.advance()
            return SPi(None, left, self.expr(), span=t.span)
        return left

    def times(self) -> Node:
        t = self.tok
        groups = self.telescope()
        if groups is not None:
            op = self.advance()
            if op.kind == "->":
                body, former = self.expr(), SPi
            else:
                body, former = self.times(), SSg
            for names, ty in reversed(groups):
                for name in reversed(names):
                    body = former(name, ty, body, span=t.span)
            return body
        left = self.at_level()
        if self.at("*"):
            self.advance()
            return SSg(None, left, self.times(), span=t.span)
        return left

    def at_level(self) -> Node:
        e = self.application()
        while self.at("@"):
            t = self.advance()
            e = SDApp(e, self.dim(), span=t.span)
        return e

    def application(self) -> Node:
        e = self.head()
        while self.starts_atom():
            e = SApp(e, self.atom(), span=e.span)
        return e

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "(", "["):
            return True
        return t.kind == "kw" and t.text in ("U", "bool", "bool^", "tt", "ff", "abort", "refl")

    def binder_group(self):
        self.expect("(")
        name = self.binder_name()
        self.expect(".")
        body = self.expr()
        self.expect(")")
        return name, body

    def head(self) -> Node:
        t = self.tok
        if t.kind != "kw" or t.text in ("U", "bool", "bool^", "tt", "ff", "abort", "refl"):
            return self.atom()
        kw = self.advance().text
        match kw:
            case "if":
                x, motive = self.binder_group()
                return SIf(x, motive, self.atom(), self.atom(), self.atom(), span=t.span)
            case "coe":
                r, r2 = self.dim(), self.dim()
                i, line = self.binder_group()
                return SCoe(r, r2, i, line, self.atom(), span=t.span)
            case "com":
                r, r2, s = self.dim(), self.dim(), self.dim()
                i, line = self.binder_group()
                j, tube = self.binder_group()
                return SCom(r, r2, s, i, line, j, tube, span=t.span)
            case "hcom":
                r, r2, s = self.dim(), self.dim(), self.dim()
                code = self.atom()
                j, tube = self.binder_group()
                return SHCom(r, r2, s, code, j, tube, span=t.span)
            case "path" | "path^":
                i, line = self.binder_group()
                cls = SPath if kw == "path" else SCodePath
                return cls(i, line, self.atom(), self.atom(), span=t.span)
            case "pi^" | "sg^":
                dom = self.atom()
                x, cod = self.binder_group()
                cls = SCodePi if kw == "pi^" else SCodeSg
                return cls(dom, x, cod, span=t.span)
            case "El":
                return SEl(self.atom(), span=t.span)
            case "tycase":
                x, motive = self.binder_group()
                scrut = self.atom()
                return STyCase(x, motive, scrut, self.tycase_arms(), span=t.span)
        raise ParseError(f"unexpected keyword {kw!r}", t.span)

    def tycase_arms(self) -> tuple:
        self.expect("{")
        arms = {}
        while True:
            t = self.tok
            if self.at("kw", "bool"):
                kind = "bool"
            elif self.at("kw", "path"):
                kind = "path"
            elif self.at("ident") and t.text in ("pi", "sg"):
                kind = t.text
            else:
                self.fail("expected a tycase arm: pi, sg, path or bool")
            self.advance()
            if kind in arms:
                raise ParseError(f"duplicate tycase arm {kind!r}", t.span)
            names = tuple(self.binder_name() for _ in range(_TYCASE_ARITY[kind]))
            self.expect("->")
            arms[kind] = (kind, names, self.expr())
            if self.at("}"):
                self.advance()
                break
            self.expect("|")
        missing = [k for k in _TYCASE_ARITY if k not in arms]
        if missing:
            self.fail(f"tycase is missing the arm(s): {', '.join(missing)}")
        return tuple(arms[k] for k in _TYCASE_ARITY)

    def atom(self) -> Node:
        e = self.atom_core()
        while self.at("proj"):
            t = self.advance()
            e = SProj(e, int(t.text), span=t.span)
        return e

    def atom_core(self) -> Node:
        t = self.tok
        if self.at("ident"):
            self.advance()
            return SVar(t.text, span=t.span)
        if t.kind == "kw":
            simple = {
                "U": SUniv,
                "bool": SBool,
                "bool^": SBoolCode,
                "tt": STt,
                "ff": SFf,
                "abort": SAbort,
                "refl": SRefl,
            }.get(t.text)
            if simple is not None:
                self.advance()
                return simple(span=t.span)
            return self.head()
        if self.at("("):
            self.advance()
            e = self.expr()
            if self.at(","):
                self.advance()
                e = SPair(e, self.expr(), span=t.span)
            elif self.at(":"):
                self.advance()
                e = SAnn(e, self.expr(), span=t.span)
            self.expect(")")
            return e
        if self.at("["):
            self.advance()
            branches = []
            while True:
                phi = self.formula()
                self.expect("->")
                branches.append((phi, self.expr()))
                if self.at("]"):
                    self.advance()
                    break
                self.expect("|")
            return SSplit(tuple(branches), span=t.span)
        got = t.text or "end of input"
        raise ParseError(f"unexpected {got!r}", t.span)


def parse(src: str) -> list[Decl]:
    return Parser(src).declarations()


def parse_expr(src: str) -> Node:
    p = Parser(src)
    e = p.expr()
    if not p.at("eof"):
        p.fail(f"unexpected {p.tok.text!r} after expression")
    return e


def parse_formula(src: str) -> Node:
    p = Parser(src)
    phi = p.formula()
    if not p.at("eof"):
        p.fail(f"unexpected {p.tok.text!r} after formula")
    return phi
