"""Executable law registry: every identity, equivalence and failure mode the
library promises is bound to a deterministic seeded check producing a LawReport."""

from .core import (
    DEFAULT_GAP,
    DEFAULT_SEED,
    CheckResult,
    LawCheck,
    LawContext,
    LawReport,
    law_ids,
    registry,
    replay_witness,
    report_jsonl,
    report_lines,
    run_all,
    run_law,
)

__all__ = [
    "DEFAULT_GAP",
    "DEFAULT_SEED",
    "CheckResult",
    "LawCheck",
    "LawContext",
    "LawReport",
    "law_ids",
    "registry",
    "replay_witness",
    "report_jsonl",
    "report_lines",
    "run_all",
    "run_law",
]
