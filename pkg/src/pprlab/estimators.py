"""PageRank estimators: the adaptive round-doubling algorithm, the
fixed-threshold bidirectional baseline, and the instance-smart wrapper."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from ._random import derive_seed, to_seed
from ._validation import check_alpha, check_graph, check_vertex
from .graph import Graph, QueryLog
from .lab import mostly_degree_n_test, smart_test_samples
from .push import PushState, increase_push_budget, log2n, push_init, push_to_threshold
from .walks import Mode, WalkRandomness, WalkStream, mc_value


class EstimatorKind(str, enum.Enum):
    ADAPTIVE = "adaptive"
    BASELINE = "baseline"
    INSTANCE_SMART = "instance_smart"


@dataclass
class RoundRecord:
    """State at the end of one adaptive round (after its three estimates)."""

    round: int
    budget: int
    r_push: float
    tau: float
    x1: float
    x2: float
    x3: float
    walks: int
    cost_spent: int
    pushes: int
    r_max: float
    stalled: bool
    queries: int

    @property
    def stops(self) -> bool:
        return max(self.x1, self.x2) >= self.tau


@dataclass
class EstimateReport:
    """Result of one estimation run with its full round trace."""

    estimate: float
    mode: EstimatorKind
    n: int
    target: int
    alpha: float
    stop_round: int = 0
    round_cap: int = 0
    forced_stop: bool = False
    rounds: list = field(default_factory=list)
    query_totals: dict = field(default_factory=dict)
    pushes: int = 0
    cost_spent: int = 0
    walks: int = 0
    walk_steps: int = 0
    capped_walks: int = 0
    push_complete: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def total_queries(self) -> int:
        return int(self.query_totals.get("total", 0))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


def round_cap(n: int, alpha: float) -> int:
    """Last round index ``ceil(log2((2 n / alpha^2) log2 n))``."""
    return max(1, math.ceil(math.log2(2 * n / alpha ** 2 * log2n(n))))


def stopping_threshold(r_push: float, n: int, alpha: float, i: int) -> float:
    return r_push * log2n(n) / (alpha * 2.0 ** (i - 2))


def _totals(log: QueryLog) -> dict:
    t = log.totals()
    t["total"] = sum(t.values())
    return t


def _walk_seeds(seed, seeds):
    if seeds is not None:
        if len(seeds) != 3:
            raise ValueError(f"need exactly three walk seeds, got {len(seeds)}")
        return tuple(to_seed(s) for s in seeds)
    base = to_seed(seed)
    return tuple(derive_seed(base, f"walks-{k}") for k in (1, 2, 3))


def adaptive_pagerank(g: Graph, t: int, alpha: float = 0.2, seed=0, *, seeds: Sequence | None = None,
                      mode: Mode | str = Mode.FULL, log: QueryLog | None = None,
                      on_round: Callable[[PushState, RoundRecord], None] | None = None,
                      observer: Callable[[PushState], None] | None = None) -> EstimateReport:
    """Estimate ``pi(t)`` with budget doubling and the three-estimate stopping rule.

    Round ``i`` grants ``2^(i-1)`` push budget, then draws ``X_1, X_2, X_3``
    from ``2^i`` walks of three independent walk streams (each stream reused
    across rounds). The run returns ``X_3`` at the first round where
    ``max(X_1, X_2) >= tau``; by the round cap it returns unconditionally.

    ``seeds`` overrides the three walk seeds that are otherwise split off
    ``seed`` as the streams ``walks-1``, ``walks-2`` and ``walks-3``.
    """
    g = check_graph(g)
    alpha = check_alpha(alpha)
    t = check_vertex(g, t, "target")
    log = QueryLog() if log is None else log
    state = push_init(g, t, alpha, log, observer=observer)
    streams = [WalkStream(g, WalkRandomness(s, mode), alpha, log) for s in _walk_seeds(seed, seeds)]
    cap = round_cap(g.n, alpha)
    report = EstimateReport(0.0, EstimatorKind.ADAPTIVE, g.n, t, alpha, round_cap=cap)

    for i in range(1, cap + 1):
        increase_push_budget(state, 2 ** (i - 1))
        q = 2 ** i
        if state.push_complete:
            # every residue is zero, so each walk would contribute nothing
            exact = state.reserve_mass() / g.n
            xs = [exact, exact, exact]
        else:
            xs = [mc_value(state, s, q) for s in streams]
        rec = RoundRecord(i, 2 ** i, state.r_push, stopping_threshold(state.r_push, g.n, alpha, i),
                          xs[0], xs[1], xs[2], q, state.cost_spent, state.pushes, state.r_max,
                          state.stalled, log.total)
        report.rounds.append(rec)
        if on_round is not None:
            on_round(state, rec)
        if rec.stops or i == cap:
            report.forced_stop = not rec.stops
            report.stop_round = i
            report.estimate = rec.x3
            break

    report.query_totals = _totals(log)
    report.pushes = state.pushes
    report.cost_spent = state.cost_spent
    report.walks = sum(s.simulated for s in streams)
    report.walk_steps = sum(s.total_steps for s in streams)
    report.capped_walks = sum(s.capped for s in streams)
    report.push_complete = state.push_complete
    report.extra = {"low_residue_pushes": state.low_residue_pushes,
                    "round_max_pushes": list(state.round_max_pushes)}
    return report


def bidirectional_ppr(g: Graph, t: int, r_max: float, q: int, seed=0, alpha: float = 0.2,
                      mode: Mode | str = Mode.FULL, log: QueryLog | None = None) -> EstimateReport:
    """Push every residue at or above ``r_max`` away, then average ``q`` walks."""
    g = check_graph(g)
    alpha = check_alpha(alpha)
    t = check_vertex(g, t, "target")
    if int(q) != q or q < 1:
        raise ValueError(f"q must be a positive integer, got {q!r}")
    log = QueryLog() if log is None else log
    state = push_init(g, t, alpha, log)
    push_to_threshold(state, r_max)
    stream = WalkStream(g, WalkRandomness(derive_seed(to_seed(seed), "walks-1"), mode), alpha, log)
    value = mc_value(state, stream, int(q))
    return EstimateReport(
        value, EstimatorKind.BASELINE, g.n, t, alpha,
        query_totals=_totals(log), pushes=state.pushes, cost_spent=state.cost_spent,
        walks=stream.simulated, walk_steps=stream.total_steps, capped_walks=stream.capped,
        push_complete=state.push_complete,
        extra={"r_max": float(r_max), "q": int(q), "final_max_residue": state.r_max,
               "reserve_mass": state.reserve_mass()},
    )


def instance_smart(g: Graph, t: int, alpha: float = 0.2, seed=0, *, mode: Mode | str = Mode.FULL,
                   log: QueryLog | None = None) -> EstimateReport:
    """Return ``1/n`` if a sampled degree test finds only degree-``n`` vertices,
    else fall back to :func:`adaptive_pagerank` on the same log."""
    g = check_graph(g)
    alpha = check_alpha(alpha)
    t = check_vertex(g, t, "target")
    log = QueryLog() if log is None else log
    base = to_seed(seed)
    samples = smart_test_samples(g.n)
    passed = mostly_degree_n_test(g, samples, derive_seed(base, "jump"), log=log)
    test_queries = _totals(log)
    if passed:
        report = EstimateReport(1.0 / g.n, EstimatorKind.INSTANCE_SMART, g.n, t, alpha,
                                query_totals=test_queries)
    else:
        report = adaptive_pagerank(g, t, alpha, base, mode=mode, log=log)
        report.mode = EstimatorKind.INSTANCE_SMART
    report.extra = {**report.extra, "test_samples": samples, "test_passed": passed,
                    "test_queries": test_queries}
    return report
