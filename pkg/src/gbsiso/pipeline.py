"""End-to-end isomorphism test built on sampler correlation tensors."""
from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .correlations import MAX_ORDER, MAX_TENSOR_ENTRIES, correlation_tensor
from .encoding import DEFAULT_ALPHA, encode, moments_from_sampler, shared_scale
from .errors import EnumerationCapExceeded, GuardError
from .graph import Graph, Permutation, is_witness, spectral_gate
from .refinement import (
    PERMANENT_MAX_SIZE,
    CostModel,
    Status,
    classify,
    enumerate_and_verify,
    full_candidates,
    refine,
    shared_tolerance,
)


class Outcome(str, enum.Enum):
    ISOMORPHIC = "ISOMORPHIC"
    NOT_ISOMORPHIC = "NOT_ISOMORPHIC"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class Config:
    kmax: int = 3
    alpha: float = DEFAULT_ALPHA
    tau_rel: float = 1e-9
    enum_cap: int = 10**6
    cost_scale: float = 1.0
    spectral_tol: float = 1e-9
    permanent_max: int = PERMANENT_MAX_SIZE
    max_order: int = MAX_ORDER
    max_entries: int = MAX_TENSOR_ENTRIES
    threads: int = 1
    seed: int = 0
    timings: bool = False

    def __post_init__(self) -> None:
        if self.kmax < 1:
            raise ValueError("kmax must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.tau_rel <= 0:
            raise ValueError("tau_rel must be positive")
        if self.enum_cap < 1:
            raise ValueError("enum_cap must be positive")
        if self.cost_scale <= 0:
            raise ValueError("cost_scale must be positive")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class TraceStep:
    k: int
    sigma_popcount: int
    classify: str
    count: int | None
    millis: float | None = None


@dataclass
class Verdict:
    outcome: Outcome
    reason: str
    order: int | None = None
    witness: Permutation | None = None
    count_bound: int | None = None
    diagnostic: str | None = None
    trace: list[TraceStep] = field(default_factory=list)

    @property
    def definite(self) -> bool:
        return self.outcome is not Outcome.INDETERMINATE

    @property
    def exit_code(self) -> int:
        return 0 if self.definite else 2

    def summary(self) -> str:
        detail = self.reason if self.order is None else f"{self.reason}, order {self.order}"
        return f"{self.outcome.value} ({detail})"

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "verdict": self.outcome.value,
            "reason": self.reason,
            "order": self.order,
        }
        if self.witness is not None:
            out["witness"] = list(self.witness)
        if self.count_bound is not None:
            out["surviving_count_bound"] = self.count_bound
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        steps = []
        for s in self.trace:
            step = {"k": s.k, "sigma_popcount": s.sigma_popcount, "classify": s.classify, "count": s.count}
            if timings:
                step["millis"] = s.millis
            steps.append(step)
        out["trace"] = steps
        return out


def versions() -> dict[str, str]:
    import scipy

    return {"gbsiso": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def report(verdict: Verdict, config: Config, **extra: Any) -> dict[str, Any]:
    out = verdict.to_dict(timings=config.timings)
    out.update(extra)
    out["config"] = config.to_dict()
    out["versions"] = versions()
    return out


def _definite(outcome: Outcome, reason: str, k: int | None, trace, **kw) -> Verdict:
    return Verdict(outcome, reason, k, trace=trace, **kw)


def run(g1: Graph, g2: Graph, config: Config = Config()) -> Verdict:
    """Decide, refute, or give up on the isomorphism of ``g1`` and ``g2``.

    Only necessary conditions can reject a pair, and every ISOMORPHIC
    verdict carries a bijection checked against the raw adjacency matrices.
    """
    trace: list[TraceStep] = []
    if g1.order != g2.order:
        return Verdict(Outcome.NOT_ISOMORPHIC, "order_mismatch")
    if not spectral_gate(g1, g2, config.spectral_tol):
        return Verdict(Outcome.NOT_ISOMORPHIC, "spectral", 0)

    m = g1.order
    atol = 0.0 if (g1.is_simple and g2.is_simple) else 1e-12
    scale = shared_scale(g1.adjacency, g2.adjacency, config.alpha)
    mom1 = moments_from_sampler(encode(g1.adjacency, scale=scale))
    mom2 = moments_from_sampler(encode(g2.adjacency, scale=scale))
    cost = CostModel(config.cost_scale)
    sigma = full_candidates(m)
    count: int | None = None

    for k in range(1, config.kmax + 1):
        start = time.perf_counter()
        try:
            c1 = correlation_tensor(mom1, k, config.max_order, config.max_entries)
            c2 = correlation_tensor(mom2, k, config.max_order, config.max_entries)
        except GuardError as exc:
            return Verdict(
                Outcome.INDETERMINATE, "guard", k - 1, count_bound=count,
                diagnostic=str(exc), trace=trace,
            )
        sigma = refine(c1, c2, sigma, shared_tolerance(c1, c2, config.tau_rel))
        status = classify(sigma, k, cost, config.permanent_max)
        count = status.count
        step = TraceStep(k, int(sigma.sum()), status.status.value, count)
        trace.append(step)

        outcome: Verdict | None = None
        if status.status is Status.INVALID:
            outcome = _definite(Outcome.NOT_ISOMORPHIC, "invalid_sigma", k, trace)
        elif status.status is Status.VALID:
            if is_witness(g1, g2, status.witness, atol):
                outcome = _definite(Outcome.ISOMORPHIC, "valid_sigma", k, trace, witness=status.witness)
            else:
                outcome = _definite(Outcome.NOT_ISOMORPHIC, "unique_candidate_rejected", k, trace)
        elif status.status is Status.BELOW:
            try:
                found = enumerate_and_verify(sigma, g1, g2, config.enum_cap, atol)
            except EnumerationCapExceeded:
                found = None
                step.classify += "+cap_exceeded"
            else:
                outcome = _found(found, k, trace)
        step.millis = round((time.perf_counter() - start) * 1000, 3)
        if outcome is not None:
            return outcome

    try:
        found = enumerate_and_verify(sigma, g1, g2, config.enum_cap, atol)
    except EnumerationCapExceeded as exc:
        return Verdict(
            Outcome.INDETERMINATE, "max_order_reached", config.kmax,
            count_bound=count, diagnostic=str(exc), trace=trace,
        )
    return _found(found, config.kmax, trace)


def _found(witness: Permutation | None, k: int, trace) -> Verdict:
    if witness is None:
        return _definite(Outcome.NOT_ISOMORPHIC, "exhausted", k, trace)
    return _definite(Outcome.ISOMORPHIC, "enumeration", k, trace, witness=witness)


# ---------------------------------------------------------------------------
# corpus runs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pair:
    id: str
    g1: Graph
    g2: Graph
    expected: bool | None = None


def _run_pair(pair: Pair, config: Config, baselines: Sequence[str]) -> dict[str, Any]:
    from .baselines import wl1_compare

    rec: dict[str, Any] = {"id": pair.id, "order": pair.g1.order}
    start = time.perf_counter()
    try:
        verdict = run(pair.g1, pair.g2, config)
    except Exception as exc:  # recorded per pair, the corpus run continues
        rec["error"] = f"{type(exc).__name__}: {exc}"
        verdict = None
    else:
        rec.update(verdict.to_dict(timings=config.timings))
    if config.timings:
        rec["millis"] = round((time.perf_counter() - start) * 1000, 3)
    if pair.expected is not None:
        rec["expected"] = "ISOMORPHIC" if pair.expected else "NOT_ISOMORPHIC"
        if verdict is not None and verdict.definite:
            rec["agrees"] = (verdict.outcome is Outcome.ISOMORPHIC) == pair.expected
    if "wl1" in baselines:
        if pair.g1.order == pair.g2.order and pair.g1.is_simple and pair.g2.is_simple:
            rec["wl1"] = wl1_compare(pair.g1, pair.g2)
        else:
            rec["wl1"] = "not_applicable"
    return rec


def run_corpus(
    pairs: Iterable[Pair], config: Config = Config(), baselines: Sequence[str] = ("wl1",)
) -> dict[str, Any]:
    """Run every pair and aggregate verdict counts and ground-truth agreement."""
    pairs = list(pairs)
    if config.threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            records = list(pool.map(lambda p: _run_pair(p, config, baselines), pairs))
    else:
        records = [_run_pair(p, config, baselines) for p in pairs]

    counts = {o.value: 0 for o in Outcome}
    counts["ERROR"] = 0
    for r in records:
        counts[r.get("verdict", "ERROR")] += 1
    checked = [r for r in records if "agrees" in r]
    summary: dict[str, Any] = {
        "pairs": len(records),
        "verdicts": counts,
        "definite_with_truth": len(checked),
        "agreement": sum(r["agrees"] for r in checked),
    }
    if "wl1" in baselines:
        wl = [r.get("wl1") for r in records]
        summary["wl1"] = {
            "distinguished": wl.count("distinguished"),
            "indeterminate": wl.count("indeterminate"),
        }
    return {"pairs": records, "summary": summary}
