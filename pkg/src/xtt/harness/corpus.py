"""Access to the .xtt files shipped inside the package."""

from __future__ import annotations

from importlib import resources

# checking order; later files may use definitions from earlier ones
FILES = ("prelude.xtt", "uip.xtt", "kan-laws.xtt", "typecase.xtt", "negatives.xtt")
NEEDS_PRELUDE = {"uip.xtt"}


def corpus_file(name: str):
    return resources.files("xtt").joinpath("corpus").joinpath(name)


def corpus_text(name: str) -> str:
    return corpus_file(name).read_text(encoding="utf-8")


def corpus() -> list[tuple[str, str]]:
    """``(name, source)`` pairs, each source self-contained."""
    out = []
    for name in FILES:
        src = corpus_text(name)
        if name in NEEDS_PRELUDE:
            src = corpus_text("prelude.xtt") + "\n" + src
        out.append((name, src))
    return out
