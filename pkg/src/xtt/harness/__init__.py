"""Verification support: the shipped corpus, the closed-boolean term
generator used by the canonicity fuzzer, and a proof-search oracle for face
entailment."""

from xtt.harness.corpus import corpus, corpus_file, corpus_text
from xtt.harness.generator import Generated, generate_closed_bool, shrink
from xtt.harness.oracle import oracle_entails

__all__ = [
    "Generated",
    "corpus",
    "corpus_file",
    "corpus_text",
    "generate_closed_bool",
    "oracle_entails",
    "shrink",
]
