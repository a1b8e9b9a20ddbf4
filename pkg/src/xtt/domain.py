"""Semantic values for normalization by evaluation.

Values are weak-head normal. Binders are closures: either a core body paired
with the environment it was evaluated in, or a host function built by the Kan
operations. Closures do not capture a solver state; the caller supplies the
state when it instantiates one, so the same closure can be forced again under
stronger assumptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from xtt.syntax import Sym, Term


@dataclass(frozen=True, slots=True)
class Env:
    vals: tuple = ()
    dims: tuple = ()
    globals: Mapping = field(default_factory=dict, compare=False)

    def push(self, *vals) -> Env:
        return Env(self.vals + vals, self.dims, self.globals)

    def push_dim(self, *dims) -> Env:
        return Env(self.vals, self.dims + dims, self.globals)

    def lookup(self, k: int):
        return self.vals[-1 - k]

    def lookup_dim(self, k: int):
        return self.dims[-1 - k]


class Value:
    __slots__ = ()


# -- closures -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Clo:
    """A core body awaiting ``arity`` term arguments."""

    env: Env
    body: Term
    arity: int = 1
    hint: str = "x"


@dataclass(frozen=True, slots=True)
class HClo:
    """A host closure ``fn(state, *args)``."""

    fn: Callable
    hint: str = "x"


@dataclass(frozen=True, slots=True)
class DClo:
    """A core body awaiting one dimension argument."""

    env: Env
    body: Term
    hint: str = "i"


@dataclass(frozen=True, slots=True)
class HDClo:
    fn: Callable
    hint: str = "i"


# -- introduction forms -------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class VLam(Value):
    clo: object


@dataclass(frozen=True, slots=True, eq=False)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True, slots=True, eq=False)
class VDLam(Value):
    clo: object


@dataclass(frozen=True, slots=True, eq=False)
class VTt(Value):
    pass


@dataclass(frozen=True, slots=True, eq=False)
class VFf(Value):
    pass


# -- types --------------------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class VPi(Value):
    dom: Value
    cod: object


@dataclass(frozen=True, slots=True, eq=False)
class VSg(Value):
    dom: Value
    cod: object


@dataclass(frozen=True, slots=True, eq=False)
class VPath(Value):
    line: object
    left: Value
    right: Value


@dataclass(frozen=True, slots=True, eq=False)
class VBool(Value):
    pass


@dataclass(frozen=True, slots=True, eq=False)
class VUniv(Value):
    pass


@dataclass(frozen=True, slots=True, eq=False)
class VEl(Value):
    """The decoding of a code that is not a code former (a neutral)."""

    code: Value


# -- codes --------------------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class VCodePi(Value):
    dom: Value
    cod: object


@dataclass(frozen=True, slots=True, eq=False)
class VCodeSg(Value):
    dom: Value
    cod: object


@dataclass(frozen=True, slots=True, eq=False)
class VCodePath(Value):
    line: object
    left: Value
    right: Value


@dataclass(frozen=True, slots=True, eq=False)
class VCodeBool(Value):
    pass


# -- partial and stuck values -------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class VSplit(Value):
    """A partial value whose selecting formula is not yet decided.

    Each branch value was computed under the ambient state extended by its
    formula.
    """

    branches: tuple


@dataclass(frozen=True, slots=True, eq=False)
class VAbort(Value):
    """The element of any type under an inconsistent constraint."""


@dataclass(frozen=True, slots=True, eq=False)
class VNeu(Value):
    ty: Value
    head: object
    spine: tuple = ()


# heads


@dataclass(frozen=True, slots=True, eq=False)
class HVar:
    sym: Sym


@dataclass(frozen=True, slots=True, eq=False)
class HCoe:
    """Coercion along a line whose code is neutral at a generic point."""

    src: object
    dst: object
    line: object
    arg: Value


@dataclass(frozen=True, slots=True, eq=False)
class HHCom:
    """Homogeneous composition at a neutral code."""

    src: object
    dst: object
    wall: object
    code: Value
    tube: object


# spine frames


@dataclass(frozen=True, slots=True, eq=False)
class FApp:
    arg: Value
    arg_ty: Value


@dataclass(frozen=True, slots=True, eq=False)
class FFst:
    pass


@dataclass(frozen=True, slots=True, eq=False)
class FSnd:
    pass


@dataclass(frozen=True, slots=True, eq=False)
class FDApp:
    dim: object


@dataclass(frozen=True, slots=True, eq=False)
class FIf:
    motive: object
    on_tt: Value
    on_ff: Value


@dataclass(frozen=True, slots=True, eq=False)
class FTypeCase:
    motive: object
    on_pi: object
    on_sg: object
    on_path: object
    on_bool: object


INTRO = (VLam, VPair, VDLam, VTt, VFf)
CODES = (VCodePi, VCodeSg, VCodePath, VCodeBool)
TYPES = (VPi, VSg, VPath, VBool, VUniv, VEl)


def var(ty: Value, hint: str = "x") -> VNeu:
    return VNeu(ty, HVar(Sym.fresh(hint)))
