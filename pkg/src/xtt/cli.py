"""The ``xtt`` command line: check, normalize, face, emit-core and fuzz.

Exit status is 0 on success, 1 when a check or verification fails and 2 on
usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time

from xtt import semantics as sem
from xtt import surface as A
from xtt.context import Context
from xtt.conversion import DEFAULT_MAX_SPLITS
from xtt.coreio import emit
from xtt.elaborate import ElabError, Elaborator
from xtt.pretty import show
from xtt.solver import assume, constraint_lines, entails
from xtt.syntax import DimConst

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("xtt")


class UsageError(Exception):
    pass


def _max_splits(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("the split depth must be at least 0")
    return n


def default_max_splits() -> int:
    env = os.environ.get("XTT_MAX_SPLITS")
    if env is None:
        return DEFAULT_MAX_SPLITS
    try:
        return _max_splits(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"XTT_MAX_SPLITS: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--max-splits",
        type=_max_splits,
        default=None,
        help=f"case-split budget for conversion (default {DEFAULT_MAX_SPLITS}, "
        "or $XTT_MAX_SPLITS)",
    )
    common.add_argument("--trace", action="store_true", help="log kernel steps to stderr")
    common.add_argument(
        "--report", choices=("human", "json-lines"), default="human", help="output format"
    )

    parser = argparse.ArgumentParser(prog="xtt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check .xtt files")
    p.add_argument("files", nargs="+", help="files checked in order, sharing definitions")
    p.add_argument("--continue", dest="keep_going", action="store_true",
                   help="keep going after a failed declaration")
    p.add_argument("--recheck", action="store_true",
                   help="print, re-parse and re-check every elaborated term")
    p.add_argument("--no-timing", action="store_true",
                   help="report elapsed-ms as 0 so reports are byte-identical across runs")

    p = sub.add_parser("normalize", parents=[common], help="print a normal form")
    p.add_argument("-e", "--expr", required=True, help="term to normalize")
    p.add_argument("-t", "--type", required=True, help="its type")
    p.add_argument("-l", "--load", action="append", default=[], metavar="FILE",
                   help="load definitions from FILE first (repeatable)")

    p = sub.add_parser("face", parents=[common], help="query the face-formula solver")
    p.add_argument("-c", "--context", default="",
                   help="comma-separated dimension names and assumed formulas, e.g. 'i, j, i = j'")
    p.add_argument("-q", "--query", required=True, help="formula to decide")

    p = sub.add_parser("emit-core", parents=[common], help="print elaborated core terms")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("fuzz", parents=[common], help="run the canonicity fuzzer")
    p.add_argument("-n", type=int, default=1000, help="number of generated terms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-shrink", action="store_true", help="report failures unshrunk")
    return parser


# -- diagnostics ----------------------------------------------------------------


def diagnostic(path: str, err) -> str:
    line, col = err.span if err.span else (0, 0)
    code = getattr(err, "code", "E001")
    lines = [f"{path}:{line}:{col}: error {code}: {err.message}"]
    lines += [f"  {d.strip()}" for d in getattr(err, "details", [])]
    return "\n".join(lines)


class Reporter:
    def __init__(self, fmt: str, out=None, timing: bool = True):
        self.fmt = fmt
        self.out = out or sys.stdout
        self.timing = timing

    def line(self, text: str):
        print(text, file=self.out)

    def result(self, path: str, res):
        if self.fmt == "json-lines":
            obj = {"file": path, **res.as_json()}
            if not self.timing:
                obj["elapsed-ms"] = 0
            self.line(json.dumps(obj, sort_keys=False))
            return
        if res.status == "ok":
            self.line(f"ok    {res.name}")
        else:
            self.line(f"FAIL  {res.name}")
            self.line(diagnostic(path, res.error))


# -- commands ---------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _parse_file(path: str):
    src = _read(path)
    try:
        return A.parse(src)
    except A.ParseError as exc:
        raise UsageError(diagnostic(path, _syntax(exc))) from None


def _syntax(exc: A.ParseError) -> ElabError:
    return ElabError("E001", exc.message, exc.span)


def cmd_check(args, max_splits: int) -> int:
    rep = Reporter(args.report, timing=not args.no_timing)
    parsed = [(path, _parse_file(path)) for path in args.files]
    el = Elaborator(max_splits=max_splits, recheck=args.recheck)
    total = failed = 0
    for path, decls in parsed:
        for d in decls:
            res = el.declare(d)
            total += 1
            rep.result(path, res)
            if res.status != "ok":
                failed += 1
                if not args.keep_going:
                    break
        if failed and not args.keep_going:
            break
    if args.report == "human":
        rep.line(f"{total - failed}/{total} declarations ok")
    return EXIT_FAIL if failed else EXIT_OK


def _load(el: Elaborator, paths) -> None:
    for path in paths:
        for d in _parse_file(path):
            res = el.declare(d)
            if res.status != "ok":
                raise _LoadFailure(diagnostic(path, res.error))


class _LoadFailure(Exception):
    pass


def cmd_normalize(args, max_splits: int) -> int:
    el = Elaborator(max_splits=max_splits)
    try:
        _load(el, args.load)
    except _LoadFailure as exc:
        print(exc, file=sys.stderr)
        return EXIT_FAIL
    try:
        nf = el.normalize(args.expr, args.type)
    except A.ParseError as exc:
        raise UsageError(diagnostic("<expr>", _syntax(exc))) from None
    except ElabError as err:
        print(diagnostic("<expr>", err), file=sys.stderr)
        return EXIT_FAIL
    if args.report == "json-lines":
        print(json.dumps({"name": "<expr>", "kind": "normalize", "status": "ok",
                          "normal-form": show(nf)}))
    else:
        print(show(nf))
    return EXIT_OK


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


def face_query(context: str, query: str):
    """Decide a face query; returns ``(verdict, state, names)``."""
    cx = Context.empty()
    el = Elaborator()
    names: dict = {}
    for part in (p.strip() for p in context.split(",")):
        if not part:
            continue
        if _NAME.fullmatch(part):
            cx, sym = cx.bind_dim(part)
            names[sym] = part
            continue
        phi = sem.eval_formula(cx.env, el.formula(cx, A.parse_formula(part)))
        cx = cx.with_state(assume(cx.state, phi))
    phi = sem.eval_formula(cx.env, el.formula(cx, A.parse_formula(query)))
    return entails(cx.state, phi), cx.state, names


def cmd_face(args, max_splits: int) -> int:
    try:
        verdict, st, names = face_query(args.context, args.query)
    except A.ParseError as exc:
        raise UsageError(diagnostic("<face>", _syntax(exc))) from None
    except ElabError as err:
        raise UsageError(diagnostic("<face>", err)) from None

    def dim(d):
        return str(d.value) if isinstance(d, DimConst) else names.get(d, str(d))

    table = constraint_lines(st, dim)
    if args.report == "json-lines":
        print(json.dumps({"name": "<face>", "kind": "face", "status": "ok",
                          "branches": table, "verdict": verdict}))
    else:
        for line in table:
            print(line)
        print(f"verdict: {'true' if verdict else 'false'}")
    return EXIT_OK


def cmd_emit_core(args, max_splits: int) -> int:
    el = Elaborator(max_splits=max_splits)
    for path in args.files:
        for d in _parse_file(path):
            res = el.declare(d)
            if res.status != "ok":
                print(diagnostic(path, res.error), file=sys.stderr)
                return EXIT_FAIL
            match d.kind, res.cores:
                case "def", (ty, body):
                    print(f"(def {d.name} {emit(ty)} {emit(body)})")
                case "check", (ty, body):
                    print(f"(check {emit(ty)} {emit(body)})")
                case "normalize", (ty, body, want):
                    print(f"(normalize {emit(ty)} {emit(body)} {emit(want)})")
    return EXIT_OK


def cmd_fuzz(args, max_splits: int) -> int:
    from xtt.harness.fuzz import run_fuzz

    if args.n < 0:
        raise UsageError("-n must be at least 0")
    json_lines = args.report == "json-lines"

    def each(out):
        if json_lines:
            print(json.dumps(out.as_json()))
        elif not out.ok:
            print(f"FAIL  fuzz-{out.index} ({out.status}): {out.generated.text}")
            print(f"  {out.detail}")

    t0 = time.perf_counter()
    report = run_fuzz(args.n, args.seed, max_splits, not args.no_shrink, each)
    elapsed = time.perf_counter() - t0
    counts = {"tt": 0, "ff": 0}
    for o in report.outcomes:
        counts[o.status] = counts.get(o.status, 0) + 1
    good = counts["tt"] + counts["ff"]
    for out, small in report.shrunk:
        msg = f"shrunk fuzz-{out.index} (seed {small.seed}, size {small.size}): {small.text}"
        if json_lines:
            print(json.dumps({"name": f"fuzz-{out.index}", "kind": "shrunk",
                              "seed": small.seed, "size": small.size, "term": small.text}))
        else:
            print(msg)
    if not json_lines:
        others = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()) if k not in ("tt", "ff"))
        print(
            f"{good}/{len(report.outcomes)} canonical (tt: {counts['tt']}, ff: {counts['ff']}"
            + (f", {others}" if others else "")
            + f") in {elapsed:.1f}s"
        )
    return EXIT_OK if good == len(report.outcomes) else EXIT_FAIL


COMMANDS = {
    "check": cmd_check,
    "normalize": cmd_normalize,
    "face": cmd_face,
    "emit-core": cmd_emit_core,
    "fuzz": cmd_fuzz,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.trace else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        max_splits = args.max_splits if args.max_splits is not None else default_max_splits()
        return COMMANDS[args.command](args, max_splits)
    except UsageError as exc:
        print(f"xtt: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
