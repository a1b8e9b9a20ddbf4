"""Typed-by-construction generation of closed boolean terms.

Terms are produced top-down from a goal type, so every output elaborates at
``El bool^`` once the prelude (sym, trans, J) is loaded. All random choices
go through a ``Tape``; replaying a recorded tape reproduces the term, and
shrinking edits the tape.

Types handled by the generator:

    ("bool",)            bool
    ("pi", A, B)         A -> B
    ("sg", A, B)         A * B
    ("path", e)          path (_. bool) e e
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

BOOL = ("bool",)


@dataclass
class Tape:
    """A replayable source of choices."""

    rng: random.Random
    replay: tuple = ()
    taken: list = field(default_factory=list)

    def draw(self, n: int) -> int:
        k = len(self.taken)
        if k < len(self.replay):
            c = self.replay[k] % n
        else:
            c = self.rng.randrange(n)
        self.taken.append(c)
        return c

    def pick(self, seq):
        return seq[self.draw(len(seq))]


@dataclass(frozen=True)
class Generated:
    seed: int
    size: int
    text: str
    trace: tuple
    nonconstant_coe: bool = False


def type_text(t) -> str:
    match t:
        case ("bool",):
            return "bool"
        case ("pi", a, b):
            return f"({type_text(a)} -> {type_text(b)})"
        case ("sg", a, b):
            return f"({type_text(a)} * {type_text(b)})"
        case ("path", e):
            return f"path (_. bool) ({e}) ({e})"
    raise ValueError(t)


def code_text(t) -> str:
    match t:
        case ("bool",):
            return "bool^"
        case ("pi", a, b):
            return f"pi^ ({code_text(a)}) (_. {code_text(b)})"
        case ("sg", a, b):
            return f"sg^ ({code_text(a)}) (_. {code_text(b)})"
        case ("path", e):
            return f"path^ (_. bool^) ({e}) ({e})"
    raise ValueError(t)


class _Gen:
    def __init__(self, tape: Tape):
        self.tape = tape
        self.fresh = 0
        self.nonconstant_coe = False

    def name(self, base="x") -> str:
        self.fresh += 1
        return f"{base}{self.fresh}"

    def split(self, budget: int, parts: int) -> list[int]:
        """Share ``budget - 1`` among ``parts`` children, each at least 1."""
        rest = max(budget - 1 - parts, 0)
        cuts = sorted(self.tape.draw(rest + 1) for _ in range(parts - 1))
        sizes = [b - a for a, b in zip([0] + cuts, cuts + [rest])]
        return [1 + s for s in sizes]

    # -- types --

    def small_type(self, depth: int = 2):
        if depth == 0:
            return BOOL
        match self.tape.draw(5):
            case 0 | 1:
                return BOOL
            case 2:
                return ("pi", self.small_type(depth - 1), self.small_type(depth - 1))
            case 3:
                return ("sg", self.small_type(depth - 1), self.small_type(depth - 1))
            case _:
                return ("path", self.tape.pick(("tt", "ff")))

    # -- terms --

    def leaf(self, t, locals_: tuple) -> str:
        match t:
            case ("bool",):
                return self.tape.pick(("tt", "ff") + locals_)
            case ("pi", a, b):
                x = self.name()
                inner = locals_ + (x,) if a == BOOL else locals_
                return f"\\{x}. {self.leaf(b, inner)}"
            case ("sg", a, b):
                return f"({self.leaf(a, locals_)}, {self.leaf(b, locals_)})"
            case ("path", e):
                return f"<_> {e}"
        raise ValueError(t)

    def term(self, t, budget: int, locals_: tuple = ()) -> str:
        if budget <= 1:
            return self.leaf(t, locals_)
        options = [self.intro, self.if_, self.beta, self.app, self.proj, self.coe,
                   self.hcom, self.j]
        if t == BOOL:
            options += [self.path_app, self.coe, self.hcom_bool]
        return self.tape.pick(options)(t, budget, locals_)

    def intro(self, t, budget, locals_):
        match t:
            case ("bool",):
                return self.leaf(t, locals_)
            case ("pi", a, b):
                x = self.name()
                inner = locals_ + (x,) if a == BOOL else locals_
                return f"\\{x}. {self.term(b, budget - 1, inner)}"
            case ("sg", a, b):
                n, m = self.split(budget, 2)
                return f"({self.term(a, n, locals_)}, {self.term(b, m, locals_)})"
            case ("path", e):
                return self.path(e, budget, locals_)
        raise ValueError(t)

    def path(self, e: str, budget: int, locals_) -> str:
        """An element of path (_. bool) e e."""
        ty = type_text(("path", e))
        match self.tape.draw(5) if budget > 2 else 0:
            case 0:
                return f"<_> {e}"
            case 1:
                return f"<i> coe 0 i (_. bool^) ({e})"
            case 2:
                p = self.path(e, budget - 1, locals_)
                return f"sym bool^ ({e}) ({e}) ({p} : {ty})"
            case 3:
                n, m = self.split(budget, 2)
                p, q = self.path(e, n, locals_), self.path(e, m, locals_)
                return f"trans bool^ ({e}) ({e}) ({e}) ({p} : {ty}) ({q} : {ty})"
            case _:
                p = self.path(e, budget - 1, locals_)
                return f"<i> hcom 0 1 i bool^ (j. ({p} : {ty}) @ j)"

    def if_(self, t, budget, locals_):
        n, m, k = self.split(budget, 3)
        dependent = self.tape.draw(2)
        # a dependent motive only decodes to the branch type at a closed scrutinee
        b = self.term(BOOL, n, () if dependent else locals_)
        x, y = self.term(t, m, locals_), self.term(t, k, locals_)
        if dependent:
            c = code_text(t)
            z = self.name("b")
            return f"if ({z}. El (if (_. U) {z} ({c}) ({c}))) ({b}) ({x}) ({y})"
        return f"if (_. {type_text(t)}) ({b}) ({x}) ({y})"

    def beta(self, t, budget, locals_):
        n, m = self.split(budget, 2)
        x = self.name()
        body = self.term(t, n, locals_ + (x,))
        return f"((\\{x}. {body}) : bool -> {type_text(t)}) ({self.term(BOOL, m, locals_)})"

    def app(self, t, budget, locals_):
        a = self.small_type(1)
        n, m = self.split(budget, 2)
        fty = ("pi", a, t)
        f = self.term(fty, n, locals_)
        return f"({f} : {type_text(fty)}) ({self.term(a, m, locals_)})"

    def proj(self, t, budget, locals_):
        other = self.small_type(1)
        if self.tape.draw(2):
            pty, which = ("sg", t, other), "1"
        else:
            pty, which = ("sg", other, t), "2"
        p = self.term(pty, budget - 1, locals_)
        return f"({p} : {type_text(pty)}).{which}"

    def path_app(self, t, budget, locals_):
        n, m = self.split(budget, 2)
        e = self.term(BOOL, n, locals_)
        ty = ("path", e)
        p = self.path(e, m, locals_)
        return f"({p} : {type_text(ty)}) @ {self.tape.pick(('0', '1'))}"

    # -- Kan operations --

    def line(self, t, budget: int) -> str:
        """A closed code line in dimension i with both ends equal to code(t)."""
        if budget <= 1 or self.tape.draw(4) == 0:
            return code_text(t)
        match t:
            case ("bool",):
                e = self.tape.pick(("tt", "ff"))
                p = self.path(e, budget - 1, ())
                pp = f"({p} : {type_text(('path', e))}) @ i"
                self.nonconstant_coe = True
                match self.tape.draw(3):
                    case 0:
                        return f"if (_. U) ({pp}) bool^ bool^"
                    case 1:
                        arms = ("pi u v -> bool^ | sg u v -> u | "
                                "path u0 u1 up x0 x1 -> bool^ | bool -> bool^")
                        return f"tycase (_. U) (sg^ bool^ (_. path^ (_. bool^) ({pp}) ({pp}))) {{ {arms} }}"
                    case _:
                        arms = ("pi u v -> bool^ | sg u v -> bool^ | "
                                "path u0 u1 up x0 x1 -> u0 | bool -> bool^")
                        return f"tycase (_. U) (path^ (_. bool^) ({pp}) ({pp})) {{ {arms} }}"
            case ("pi", a, b) | ("sg", a, b):
                n, m = self.split(budget, 2)
                kw = "pi^" if t[0] == "pi" else "sg^"
                return f"{kw} ({self.line(a, n)}) (_. {self.line(b, m)})"
            case ("path", e):
                ty = type_text(("path", e))
                n, m = self.split(budget, 2)
                p, q = self.path(e, n, ()), self.path(e, m, ())
                self.nonconstant_coe = True
                return f"path^ (_. bool^) (({p} : {ty}) @ i) (({q} : {ty}) @ i)"
        raise ValueError(t)

    def dims(self):
        return self.tape.pick(("0", "1")), self.tape.pick(("0", "1"))

    def coe(self, t, budget, locals_):
        n, m = self.split(budget, 2)
        r, r2 = self.dims()
        return f"coe {r} {r2} (i. {self.line(t, n)}) ({self.term(t, m, locals_)})"

    def hcom(self, t, budget, locals_):
        """hcom with a constant tube, under a bound wall dimension when possible."""
        a = self.term(t, budget - 1, locals_)
        code = code_text(t)
        r, r2 = self.dims()
        if self.tape.draw(2):
            return f"hcom {r} {r2} {self.tape.pick(('0', '1'))} ({code}) (i. {a})"
        k = self.tape.pick(("0", "1"))
        return f"com {r} {r2} {k} (i. {code}) (i. {a})"

    def hcom_bool(self, t, budget, locals_):
        """hcom at bool^ whose wall is a bound dimension, applied at an end."""
        n, m = self.split(budget, 2)
        e = self.term(BOOL, n, locals_)
        ty = type_text(("path", e))
        p = self.path(e, m, locals_)
        r, r2 = self.dims()
        body = f"<k> hcom {r} {r2} k bool^ (i. ({p} : {ty}) @ i)"
        return f"(({body}) : {ty}) @ {self.tape.pick(('0', '1'))}"

    def j(self, t, budget, locals_):
        n, m, k = self.split(budget, 3)
        e = self.term(BOOL, n, locals_)
        p = self.path(e, m, locals_)
        c = code_text(t)
        x = self.name()
        body = self.term(t, k, locals_ + (x,))
        return (
            f"J bool^ (\\_ _ _. {c}) ({e}) ({e}) ({p} : {type_text(('path', e))}) "
            f"(\\{x}. {body})"
        )


def generate_closed_bool(seed: int, size: int, replay: tuple = ()) -> Generated:
    """A closed term of type bool built with at most about ``size`` productions."""
    if size < 1:
        raise ValueError("size must be at least 1")
    tape = Tape(random.Random(seed), tuple(replay))
    g = _Gen(tape)
    text = g.term(BOOL, size)
    return Generated(seed, size, text, tuple(tape.taken), g.nonconstant_coe)


def shrink(found: Generated, fails) -> Generated:
    """Replay the trace with smaller budgets and simpler choices while ``fails`` holds."""
    best = found
    improved = True
    while improved:
        improved = False
        for size in range(1, best.size):
            cand = generate_closed_bool(best.seed, size, best.trace)
            if fails(cand):
                best, improved = cand, True
                break
        if improved:
            continue
        for k in range(len(best.trace)):
            if best.trace[k] == 0:
                continue
            trace = best.trace[:k] + (0,) + best.trace[k + 1 :]
            cand = generate_closed_bool(best.seed, best.size, trace)
            if len(cand.text) < len(best.text) and fails(cand):
                best, improved = cand, True
                break
    return best
