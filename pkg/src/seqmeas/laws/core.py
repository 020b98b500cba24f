"""Law-check engine: registry, runner and report types.

Three kinds of checks:

* ``identity``        -- an equation that must hold on every sampled trial.
* ``iff``             -- both directions of an equivalence: constructed
                         instances satisfying the hypothesis must pass, generic
                         instances violating it must fail by a visible gap.
* ``counterexample``  -- an "in general false" claim: the check passes exactly
                         when a violation larger than the gap threshold is
                         found within the trial budget.

Every law draws from its own RNG stream derived from hash(seed, law id), so a
report is a pure function of (id, dims, trials, seed, tolerances) except for
its ``elapsed`` field.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import UnknownLaw
from ..matcore import EQ_TOL, PSD_TOL

DEFAULT_SEED = 42
DEFAULT_GAP = 0.01


@dataclass
class LawContext:
    """Everything a check needs: dimensions, budget, RNG stream, tolerances."""

    dims: tuple[int, ...]
    trials: int
    rng: np.random.Generator
    eq_tol: float = EQ_TOL
    psd_tol: float = PSD_TOL
    gap: float = DEFAULT_GAP


@dataclass
class Tally:
    """Accumulates identity-side deviations and boolean assertions."""

    tol: float
    max_deviation: float = 0.0
    ok: bool = True
    witness: dict | None = None

    def expect(self, deviation: float, label: str, witness: dict | None = None,
               tol: float | None = None) -> None:
        deviation = float(deviation)
        self.max_deviation = max(self.max_deviation, deviation)
        if deviation > (self.tol if tol is None else tol) and self.ok:
            self.ok = False
            self.witness = {"assertion": label, "deviation": deviation, **(witness or {})}

    def expect_true(self, condition: bool, label: str, witness: dict | None = None) -> None:
        if not condition and self.ok:
            self.ok = False
            self.witness = {"assertion": label, **(witness or {})}


@dataclass
class CheckResult:
    ok: bool
    max_deviation: float
    trials: int
    witness: dict | None = None
    found: bool | None = None  # counterexample kind only


@dataclass(frozen=True)
class LawCheck:
    """One registered law: identity of the claim plus its default budget."""

    id: str
    kind: str  # identity | iff | counterexample
    dims: tuple[int, ...]
    trials: int
    description: str
    fn: Callable[[LawContext], CheckResult]
    gap: float | None = None  # law-specific violation threshold override
    replay: Callable[[dict], float] | None = None


@dataclass
class LawReport:
    """Outcome of one law check.

    For counterexample checks ``max_deviation`` is the largest violation found
    (the distance from the would-be law) and ``witness`` holds the inputs that
    produced it, serialized so they can be replayed through the library.
    """

    id: str
    kind: str
    status: str  # pass | fail | counterexample-found | counterexample-missing
    trials: int
    max_deviation: float
    witness: dict | None
    seed: int
    elapsed: float
    dims: tuple[int, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "counterexample-found")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "status": self.status,
            "dims": list(self.dims),
            "trials": self.trials,
            "max_deviation": self.max_deviation,
            "witness": self.witness,
            "seed": self.seed,
            "elapsed": self.elapsed,
        }


_REGISTRY: dict[str, LawCheck] = {}

# Canonical listing order (follows the source material section by section).
LAW_ORDER = (
    "axioms-1", "axioms-2", "axioms-3", "axioms-4",
    "thm-1.1", "thm-1.2i", "thm-1.2ii", "eq-1.1",
    "eq-2.1", "eq-2.2", "eq-2.3/2.4",
    "lemma-2.1", "thm-2.2", "cor-2.3",
    "ex-1", "ex-2", "ex-3", "ex-4", "ex-5",
    "thm-2.4i", "thm-2.4ii",
    "thm-3.1i", "thm-3.1ii", "thm-3.1iii",
    "ex-6", "ex-7", "ex-8",
    "lemma-3.2", "lemma-3.3", "ex-9",
    "thm-4.1i", "thm-4.1ii", "thm-4.1iii", "thm-4.2",
    "ex-10", "lemma-4.3", "lemma-4.4",
    "bayes-obs", "cond-prob-measure",
)


def register(law: LawCheck) -> LawCheck:
    if law.id in _REGISTRY:
        raise ValueError(f"duplicate law id {law.id!r}")
    _REGISTRY[law.id] = law
    return law


def registry() -> dict[str, LawCheck]:
    _ensure_loaded()
    return {law_id: _REGISTRY[law_id] for law_id in law_ids()}


def law_ids() -> list[str]:
    _ensure_loaded()
    ordered = [law_id for law_id in LAW_ORDER if law_id in _REGISTRY]
    ordered.extend(law_id for law_id in _REGISTRY if law_id not in LAW_ORDER)
    return ordered


def _ensure_loaded() -> None:
    # The check modules self-register on import.
    from . import checks_effects, checks_instruments, checks_operations  # noqa: F401


def _law_rng(seed: int, law_id: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{law_id}:{seed}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def run_law(law_id: str, dims=None, trials: int | None = None, seed: int = DEFAULT_SEED,
            eq_tol: float = EQ_TOL, psd_tol: float = PSD_TOL,
            gap: float = DEFAULT_GAP) -> LawReport:
    """Run one registered law and return its report."""
    _ensure_loaded()
    law = _REGISTRY.get(law_id)
    if law is None:
        raise UnknownLaw(f"no law registered under {law_id!r}")
    use_dims = tuple(int(d) for d in dims) if dims is not None else law.dims
    use_trials = law.trials if trials is None else int(trials)
    use_gap = law.gap if law.gap is not None else gap
    start = time.perf_counter()
    if use_trials <= 0:
        status = "counterexample-missing" if law.kind == "counterexample" else "fail"
        return LawReport(
            id=law.id, kind=law.kind, status=status, trials=0, max_deviation=0.0,
            witness={"reason": "no trials run"}, seed=seed,
            elapsed=time.perf_counter() - start, dims=use_dims,
        )
    ctx = LawContext(
        dims=use_dims, trials=use_trials, rng=_law_rng(seed, law.id),
        eq_tol=eq_tol, psd_tol=psd_tol, gap=use_gap,
    )
    result = law.fn(ctx)
    elapsed = time.perf_counter() - start
    if law.kind == "counterexample":
        if not result.ok:
            status = "fail"
        else:
            status = "counterexample-found" if result.found else "counterexample-missing"
    else:
        status = "pass" if result.ok else "fail"
    return LawReport(
        id=law.id, kind=law.kind, status=status, trials=result.trials,
        max_deviation=result.max_deviation, witness=result.witness, seed=seed,
        elapsed=elapsed, dims=use_dims,
    )


def run_all(dims=None, trials: int | None = None, seed: int = DEFAULT_SEED,
            eq_tol: float = EQ_TOL, psd_tol: float = PSD_TOL,
            gap: float = DEFAULT_GAP) -> list[LawReport]:
    """Run every registered law (per-law default dims/trials unless overridden)."""
    return [
        run_law(law_id, dims=dims, trials=trials, seed=seed,
                eq_tol=eq_tol, psd_tol=psd_tol, gap=gap)
        for law_id in law_ids()
    ]


def replay_witness(report: LawReport | dict) -> float:
    """Recompute a counterexample's violation from its serialized witness.

    Closes the loop: the witness embedded in a report must reproduce the
    violation when pushed back through the library.
    """
    _ensure_loaded()
    data = report.to_json() if isinstance(report, LawReport) else report
    law = _REGISTRY.get(data["id"])
    if law is None:
        raise UnknownLaw(f"no law registered under {data['id']!r}")
    if law.replay is None:
        raise UnknownLaw(f"law {law.id!r} has no witness replay")
    if not data.get("witness"):
        raise UnknownLaw(f"report for {law.id!r} carries no witness")
    return law.replay(data["witness"])


def report_lines(reports: list[LawReport]) -> str:
    """Stable line-oriented text rendering."""
    lines = []
    for r in reports:
        lines.append(
            f"{r.status:<24} {r.id:<18} dims={','.join(str(d) for d in r.dims):<8} "
            f"trials={r.trials:<5} max_dev={r.max_deviation:.3e} elapsed={r.elapsed:.3f}s"
        )
    n_ok = sum(r.ok for r in reports)
    lines.append(f"ok {n_ok}/{len(reports)} laws")
    return "\n".join(lines)


def report_jsonl(reports: list[LawReport]) -> str:
    return "\n".join(json.dumps(r.to_json()) for r in reports)
