"""Backward push (pushback) with the adaptive budget and threshold schedule.

The state keeps residues ``r`` and reserves ``p`` such that for every source
``s``::

    pi(s, t) = p(s) + sum_v pi(s, v) * r(v)

Push candidates live in a lazy max-heap keyed by ``floor(log2 r(v))`` with
ties broken by lowest vertex id. Because the push threshold is always a power
of two, ``r(v) >= r_push`` holds exactly when that bucket key reaches
``log2 r_push``.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter, deque
from typing import Callable

import numpy as np

from ._validation import check_alpha, check_graph, check_vertex
from .graph import Graph, Oracle, QueryLog

# below this in-degree a plain loop beats numpy call overhead
_VECTOR_MIN = 24


def _bucket(x: float) -> int:
    return math.frexp(x)[1] - 1


def log2n(n: int) -> float:
    return math.log2(max(n, 2))


class PushState:
    """Residues, reserves and the ``r_push``/``v_push``/``b_push`` schedule.

    Parameters
    ----------
    g : Graph
        Normalized graph.
    t : int
        Target vertex.
    alpha : float
        Termination probability.
    log : QueryLog, optional
        Receives every oracle query issued by pushes.
    selector : numpy Generator, optional
        When given, the next push candidate is drawn uniformly from all
        eligible vertices instead of the bucket rule. Used by tests.
    observer : callable, optional
        Called with the state after every push and after every candidate
        selection.
    """

    def __init__(self, g: Graph, t: int, alpha: float = 0.2, log: QueryLog | None = None,
                 selector: np.random.Generator | None = None,
                 observer: Callable[["PushState"], None] | None = None):
        self.graph = check_graph(g)
        self.alpha = check_alpha(alpha)
        self.target = check_vertex(self.graph, t, "target")
        self.oracle = Oracle(self.graph, log)
        self.selector = selector
        self.observer = observer
        n = self.graph.n
        self.r = np.zeros(n)
        self.p = np.zeros(n)
        self.r[self.target] = 1.0
        self.r_push_exp = 0
        self.v_push = self.target
        self.b_push = 1
        self.cost_spent = 0
        self.pushes = 0
        self.round = 0
        self.pushes_this_round: Counter = Counter()
        self.round_max_pushes: list[int] = []
        self.low_residue_pushes = 0
        self.floor = self.alpha ** 2 / (2 * n * log2n(n))
        self.stalled = False
        self._heap = [(0, self.target)]

    # derived quantities --------------------------------------------------

    @property
    def log(self) -> QueryLog:
        return self.oracle.log

    @property
    def r_push(self) -> float:
        return math.ldexp(1.0, self.r_push_exp)

    @property
    def r_max(self) -> float:
        return float(self.r.max())

    @property
    def push_complete(self) -> bool:
        return not self.r.any()

    def reserve_mass(self) -> float:
        return float(self.p.sum())

    def snapshot(self) -> dict:
        return {
            "r_push": self.r_push,
            "v_push": int(self.v_push),
            "b_push": int(self.b_push),
            "cost_spent": int(self.cost_spent),
            "pushes": int(self.pushes),
            "r_max": self.r_max,
            "reserve_mass": self.reserve_mass(),
            "push_complete": self.push_complete,
            "stalled": self.stalled,
        }

    # oracle helpers ------------------------------------------------------

    def _indeg(self, v: int) -> int:
        if self.log.detail:
            return self.oracle.indeg(v)
        self.log.counts["INDEG"] += 1
        return self.graph.in_degree(v)

    def _top(self):
        heap, r = self._heap, self.r
        while heap:
            key, u = heap[0]
            x = r[u]
            if x > 0.0 and _bucket(x) == -key:
                return -key, u
            heapq.heappop(heap)
        return None

    def _touch(self, vertices) -> None:
        r, heap = self.r, self._heap
        for u in vertices:
            x = r[u]
            if x > 0.0:
                heapq.heappush(heap, (-_bucket(x), int(u)))

    def _select_next(self) -> bool:
        """Halve ``r_push`` until a vertex qualifies; False once past the floor."""
        while True:
            if self.selector is not None:
                eligible = np.flatnonzero(self.r >= self.r_push)
                if len(eligible):
                    self.v_push = int(self.selector.choice(eligible))
                    break
            else:
                top = self._top()
                if top is not None and top[0] >= self.r_push_exp:
                    self.v_push = top[1]
                    break
            if self.r_push < self.floor:
                self.stalled = True
                break
            self.r_push_exp -= 1
        if self.observer is not None:
            self.observer(self)
        return not self.stalled


def push_init(g: Graph, t: int, alpha: float = 0.2, log: QueryLog | None = None, **kwargs) -> PushState:
    """Fresh state: ``r(t) = 1``, ``r_push = 1``, ``v_push = t``, ``b_push = 1``."""
    return PushState(g, t, alpha, log, **kwargs)


def pushback(state: PushState, v: int) -> np.ndarray:
    """Settle ``alpha * r(v)`` into ``p(v)`` and spread the rest to in-neighbors.

    Returns the in-neighbors touched (with repeats for parallel edges).
    """
    r, alpha, g = state.r, state.alpha, state.graph
    rv = float(r[v])
    if not rv > 0.0:
        raise ValueError(f"pushback on vertex {v} with zero residue")
    log = state.log
    d_in = state._indeg(v)
    state.p[v] += alpha * rv
    r[v] = 0.0
    share = (1.0 - alpha) * rv
    if log.detail:
        touched = []
        for i in range(1, d_in + 1):
            u = state.oracle.in_(v, i)
            r[u] += share / state.oracle.outdeg(u)
            touched.append(u)
        touched = np.asarray(touched, dtype=np.int64)
    else:
        touched = g.in_neighbors(v)
        log.counts["IN"] += d_in
        log.counts["OUTDEG"] += d_in
        if d_in >= _VECTOR_MIN:
            np.add.at(r, touched, share / g.out_degrees[touched])
        else:
            out_deg = g.out_degrees
            for u in touched.tolist():
                r[u] += share / out_deg[u]
    state.cost_spent += d_in + 1
    state.pushes += 1
    state.pushes_this_round[v] += 1
    state._touch(np.unique(touched).tolist() if d_in >= _VECTOR_MIN else set(touched.tolist()))
    if state.observer is not None:
        state.observer(state)
    return touched


def increase_push_budget(state: PushState, b: int) -> PushState:
    """Grant ``b`` more budget units and push while ``v_push`` is affordable.

    Each call is one round for the per-round push accounting. Pushing stops
    when ``b_push <= d_in(v_push)`` or once ``r_push`` has dropped below
    ``alpha^2 / (2 n log2 n)``; leftover budget is kept.
    """
    if int(b) != b or b < 0:
        raise ValueError(f"budget increment must be a non-negative integer, got {b!r}")
    state.round += 1
    state.pushes_this_round = Counter()
    state.b_push += int(b)
    if not state.stalled:
        while state.b_push > state._indeg(state.v_push):
            v = state.v_push
            if state.r[v] < state.r_push:
                state.low_residue_pushes += 1
            pushback(state, v)
            state.b_push -= state.graph.in_degree(v) + 1
            if not state._select_next():
                break
    state.round_max_pushes.append(max(state.pushes_this_round.values(), default=0))
    return state


def push_to_threshold(state: PushState, r_max: float) -> PushState:
    """Push every vertex whose residue is at least ``r_max`` until none is left."""
    if not 0.0 < r_max <= 1.0:
        raise ValueError(f"r_max must lie in (0, 1], got {r_max!r}")
    r = state.r
    queue = deque(int(v) for v in np.flatnonzero(r >= r_max))
    queued = set(queue)
    while queue:
        v = queue.popleft()
        queued.discard(v)
        if r[v] < r_max:
            continue
        for u in set(pushback(state, v).tolist()):
            if r[u] >= r_max and u not in queued:
                queue.append(u)
                queued.add(u)
    return state
