"""The canonicity fuzzer: generated closed booleans must normalize to tt or ff."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from xtt import syntax as S
from xtt.conversion import DEFAULT_MAX_SPLITS
from xtt.elaborate import ElabError, Elaborator, check_source
from xtt.harness.corpus import corpus_text
from xtt.harness.generator import Generated, generate_closed_bool, shrink
from xtt.pretty import show
from xtt.surface import ParseError

MAX_SIZE = 16


@dataclass(frozen=True)
class Outcome:
    index: int
    generated: Generated
    status: str  # "tt", "ff", or a failure kind
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status in ("tt", "ff")

    def as_json(self) -> dict:
        out = {
            "name": f"fuzz-{self.index}",
            "kind": "fuzz",
            "status": "ok" if self.ok else "fail",
            "seed": self.generated.seed,
            "size": self.generated.size,
            "result": self.status,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class FuzzReport:
    outcomes: list = field(default_factory=list)
    elapsed_s: float = 0.0
    shrunk: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [o for o in self.outcomes if not o.ok]


def prelude_defs(max_splits: int = DEFAULT_MAX_SPLITS) -> dict:
    el, results = check_source(corpus_text("prelude.xtt"), max_splits)
    bad = [r.name for r in results if r.status != "ok"]
    if bad:
        raise RuntimeError(f"prelude failed to check: {bad}")
    return el.defs


def judge(g: Generated, defs: dict, max_splits: int = DEFAULT_MAX_SPLITS):
    """Classify one generated term: ``tt``/``ff`` or a failure kind with detail."""
    el = Elaborator(max_splits=max_splits, defs=dict(defs))
    try:
        nf = el.normalize(g.text, "El bool^")
    except (ElabError, ParseError) as exc:
        return "ill-typed", str(exc)
    except RecursionError:
        return "fault", "recursion limit"
    if el.conv.undecided:
        return "undecided", show(nf)
    match nf:
        case S.Tt():
            return "tt", ""
        case S.Ff():
            return "ff", ""
    return "stuck", show(nf)


def case_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def run_fuzz(n: int, seed: int, max_splits: int = DEFAULT_MAX_SPLITS,
             shrink_failures: bool = True, on_outcome=None) -> FuzzReport:
    defs = prelude_defs(max_splits)
    report = FuzzReport()
    t0 = time.perf_counter()
    for k in range(n):
        g = generate_closed_bool(case_seed(seed, k), 1 + k % MAX_SIZE)
        status, detail = judge(g, defs, max_splits)
        out = Outcome(k, g, status, detail)
        report.outcomes.append(out)
        if on_outcome is not None:
            on_outcome(out)
    report.elapsed_s = time.perf_counter() - t0
    if shrink_failures:
        for out in report.failures:
            small = shrink(out.generated, lambda c: judge(c, defs, max_splits)[0] not in ("tt", "ff"))
            report.shrunk.append((out, small))
    return report
