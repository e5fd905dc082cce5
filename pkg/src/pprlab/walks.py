"""Alpha-discounted random walks and the Monte Carlo estimator.

Every random choice of walk ``j`` is a pure function of ``(seed, j, step,
lane)``, so the walk with a given id is the same whether it is simulated
alone, in a batch, or again in a later round.

Two randomness modes:

* ``FULL`` -- a SplitMix64 counter hash per walk (fully independent walks
  for practical purposes).
* ``PAIRWISE`` -- one multiply-add-shift hash ``f(x) = ((a*x + b) mod 2^64)
  >> 32`` per (step, lane), drawn from the seed and shared by all walks.
  Any two walks are independent; the family is 2-independent on 32-bit ids.

Lane 0 of a step is the termination coin; lanes 1.. drive the out-edge
choice with rejection sampling so the choice is exactly uniform. JUMP uses
the lanes of step -1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from ._random import GOLDEN_GAMMA, MASK64, counter_draw, derive_seed, stream_key
from ._validation import check_alpha, check_graph, check_vertex
from .graph import Graph, Oracle, QueryLog

LANES = 8


class Mode(str, enum.Enum):
    FULL = "full"
    PAIRWISE = "pairwise"


def walk_cap(alpha: float) -> int:
    """Hard step cap; reaching it is a ``(1-alpha)^cap`` event."""
    return int(math.ceil(100.0 / alpha))


@dataclass(frozen=True)
class WalkRandomness:
    """Seed and mode for a family of walks indexed by walk id."""

    seed: int
    mode: Mode = Mode.FULL

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def key(self) -> int:
        return stream_key(self.seed, 0)

    def hash_table(self, alpha: float) -> tuple[np.ndarray, np.ndarray]:
        """Multiply-add-shift parameters, rows = steps ``-1..cap``."""
        rows = walk_cap(alpha) + 2
        rng = np.random.Generator(np.random.PCG64(derive_seed(self.seed, "pairwise-hash")))
        a = rng.integers(0, 2**64, size=(rows, LANES), dtype=np.uint64, endpoint=False)
        b = rng.integers(0, 2**64, size=(rows, LANES), dtype=np.uint64, endpoint=False)
        return a, b


# scalar reference draws (pure Python) --------------------------------------


class _ScalarDraws:
    """Pure-Python twin of the compiled kernel's random draws."""

    def __init__(self, rand: WalkRandomness, alpha: float):
        self.rand = rand
        self.alpha = alpha
        self.cap = walk_cap(alpha)
        if rand.mode is Mode.FULL:
            self.key = rand.key
        else:
            a, b = rand.hash_table(alpha)
            self.a, self.b = a.tolist(), b.tolist()

    def _raw(self, walk: int, step: int, lane: int) -> tuple[int, int]:
        """Returns ``(value, bits)``."""
        if self.rand.mode is Mode.FULL:
            h = counter_draw(self.key, (walk << 16) ^ ((step + 1) * LANES + lane))
            return h, 64
        row = step + 1
        h = ((self.a[row][lane] * walk + self.b[row][lane]) & MASK64) >> 32
        return h, 32

    def terminates(self, walk: int, step: int) -> bool:
        h, bits = self._raw(walk, step, 0)
        if bits == 64:
            return (h >> 11) * 2.0**-53 < self.alpha
        return h * 2.0**-32 < self.alpha

    def index(self, walk: int, step: int, size: int, first_lane: int = 1) -> int:
        h = 0
        for lane in range(first_lane, LANES):
            h, bits = self._raw(walk, step, lane)
            span = 1 << bits
            if h < span - span % size:
                return h % size
        return h % size


def _walk_python(oracle: Oracle, draws: _ScalarDraws, walk: int, start: int | None):
    """One walk through the oracle; returns ``(terminal, capped)``."""
    if start is None:
        v = oracle.jump(lambda n: draws.index(walk, -1, n, first_lane=0))
    else:
        v = start
    for step in range(draws.cap):
        if draws.terminates(walk, step):
            return v, False
        d = oracle.outdeg(v)
        v = oracle.out(v, draws.index(walk, step, d) + 1)
    return v, True


# compiled kernel -------------------------------------------------------------

_U = np.uint64


@numba.njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


@numba.njit(cache=True, inline="always")
def _raw(full, key, ta, tb, walk, step, lane):
    if full:
        c = (_U(walk) << _U(16)) ^ _U((step + 1) * 8 + lane)
        return _mix(key + _U(0x9E3779B97F4A7C15) * (c + _U(1)))
    row = step + 1
    return (ta[row, lane] * _U(walk) + tb[row, lane]) >> _U(32)


@numba.njit(cache=True, inline="always")
def _index(full, key, ta, tb, walk, step, size, first_lane):
    s = _U(size)
    if full:
        # 2^64 mod s without 128-bit arithmetic
        rem = (_U(0) - s) % s
        limit = _U(0) - rem
        whole = rem == _U(0)
    else:
        span = _U(1) << _U(32)
        limit = span - span % s
        whole = False
    h = _U(0)
    for lane in range(first_lane, 8):
        h = _raw(full, key, ta, tb, walk, step, lane)
        if whole or h < limit:
            return np.int64(h % s)
    return np.int64(h % s)


@numba.njit(cache=True, nogil=True)
def _simulate(out_ptr, out_idx, n, alpha, cap, full, key, ta, tb, lo, hi, starts, terminals, steps):
    """Walks ``lo..hi-1``; ``starts`` is empty for JUMP sources."""
    capped = 0
    thresh53 = alpha * 9007199254740992.0
    thresh32 = alpha * 4294967296.0
    for j in range(lo, hi):
        if starts.shape[0] == 0:
            v = _index(full, key, ta, tb, j, -1, n, 0)
        else:
            v = starts[j - lo]
        k = 0
        done = False
        while k < cap:
            h = _raw(full, key, ta, tb, j, k, 0)
            if full:
                stop = np.float64(h >> _U(11)) < thresh53
            else:
                stop = np.float64(h) < thresh32
            if stop:
                done = True
                break
            s = out_ptr[v]
            d = out_ptr[v + 1] - s
            v = np.int64(out_idx[s + _index(full, key, ta, tb, j, k, d, 1)])
            k += 1
        if not done:
            capped += 1
        terminals[j - lo] = v
        steps[j - lo] = k
    return capped


_EMPTY_TABLE = np.zeros((1, LANES), dtype=np.uint64)
_NO_STARTS = np.zeros(0, dtype=np.int64)


class WalkStream:
    """Lazily extended sequence of walk terminals for one seed.

    ``terminals(q)`` returns the terminals of walks ``0..q-1``. Walks already
    simulated are reused, which is what reusing a seed across rounds means.
    Queries are logged once per simulated walk.
    """

    def __init__(self, g: Graph, rand: WalkRandomness, alpha: float = 0.2, log: QueryLog | None = None):
        self.graph = check_graph(g)
        self.alpha = check_alpha(alpha)
        self.rand = rand
        self.oracle = Oracle(self.graph, log)
        self.cap = walk_cap(self.alpha)
        self.capped = 0
        self._term = np.zeros(0, dtype=np.int64)
        self._steps = 0
        if rand.mode is Mode.FULL:
            self._ta = self._tb = _EMPTY_TABLE
        else:
            self._ta, self._tb = rand.hash_table(self.alpha)
        self._draws = None

    @property
    def simulated(self) -> int:
        return len(self._term)

    @property
    def total_steps(self) -> int:
        return self._steps

    def _extend(self, hi: int) -> None:
        lo = len(self._term)
        if hi <= lo:
            return
        log = self.oracle.log
        if log.detail:
            if self._draws is None:
                self._draws = _ScalarDraws(self.rand, self.alpha)
            new = np.empty(hi - lo, dtype=np.int64)
            for j in range(lo, hi):
                before = log.counts["OUT"]
                new[j - lo], capped = _walk_python(self.oracle, self._draws, j, None)
                self.capped += capped
                self._steps += log.counts["OUT"] - before
        else:
            new = np.empty(hi - lo, dtype=np.int64)
            steps = np.empty(hi - lo, dtype=np.int64)
            g = self.graph
            self.capped += _simulate(g.out_ptr, g.out_idx, g.n, self.alpha, self.cap,
                                     self.rand.mode is Mode.FULL, np.uint64(self.rand.key),
                                     self._ta, self._tb, lo, hi, _NO_STARTS, new, steps)
            k = int(steps.sum())
            self._steps += k
            log.counts["JUMP"] += hi - lo
            log.counts["OUTDEG"] += k
            log.counts["OUT"] += k
        self._term = np.concatenate([self._term, new])

    def terminals(self, q: int) -> np.ndarray:
        self._extend(q)
        return self._term[:q]


@dataclass
class McEstimate:
    """Estimate ``sum p / n + sum_v (count(v) / q) r(v)`` with its inputs."""

    value: float
    walks: int
    terminal_counts: dict = field(default_factory=dict)


def monte_carlo(state, stream: WalkStream, q: int) -> McEstimate:
    """Bidirectional estimator from ``q`` walks of ``stream`` and a push state."""
    if q < 1:
        raise ValueError(f"need at least one walk, got q={q}")
    term = stream.terminals(q)
    value = state.reserve_mass() / state.graph.n + float(state.r[term].sum()) / q
    ids, counts = np.unique(term, return_counts=True)
    return McEstimate(value, q, dict(zip(ids.tolist(), counts.tolist())))


def mc_value(state, stream: WalkStream, q: int) -> float:
    """:func:`monte_carlo` without building the terminal histogram."""
    term = stream.terminals(q)
    return state.reserve_mass() / state.graph.n + float(state.r[term].sum()) / q


def sample_walk(g: Graph, start: int, rand: WalkRandomness, walk_id: int,
                alpha: float = 0.2, log: QueryLog | None = None) -> int:
    """Terminal vertex of walk ``walk_id`` started at ``start``."""
    g = check_graph(g)
    alpha = check_alpha(alpha)
    start = check_vertex(g, start, "start")
    oracle = Oracle(g, log)
    if oracle.log.detail:
        v, _ = _walk_python(oracle, _ScalarDraws(rand, alpha), int(walk_id), start)
        return v
    ta, tb = (_EMPTY_TABLE, _EMPTY_TABLE) if rand.mode is Mode.FULL else rand.hash_table(alpha)
    term = np.empty(1, dtype=np.int64)
    steps = np.empty(1, dtype=np.int64)
    _simulate(g.out_ptr, g.out_idx, g.n, alpha, walk_cap(alpha), rand.mode is Mode.FULL,
              np.uint64(rand.key), ta, tb, int(walk_id), int(walk_id) + 1,
              np.array([start], dtype=np.int64), term, steps)
    oracle.log.counts["OUTDEG"] += int(steps[0])
    oracle.log.counts["OUT"] += int(steps[0])
    return int(term[0])


def sample_terminals(g: Graph, start: int, rand: WalkRandomness, count: int, alpha: float = 0.2) -> np.ndarray:
    """Terminals of walks ``0..count-1`` all started at ``start`` (batch helper)."""
    g = check_graph(g)
    ta, tb = (_EMPTY_TABLE, _EMPTY_TABLE) if rand.mode is Mode.FULL else rand.hash_table(alpha)
    term = np.empty(count, dtype=np.int64)
    steps = np.empty(count, dtype=np.int64)
    _simulate(g.out_ptr, g.out_idx, g.n, alpha, walk_cap(alpha), rand.mode is Mode.FULL,
              np.uint64(rand.key), ta, tb, 0, count, np.full(count, start, dtype=np.int64), term, steps)
    return term
