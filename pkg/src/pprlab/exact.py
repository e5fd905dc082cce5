"""Ground-truth PPR, PageRank and set-avoiding PPR by fixed-point iteration.

For a fixed target ``t`` the column ``x(v) = pi(v, t)`` solves

    x(v) = alpha * [v == t] + (1 - alpha) * mean(x(w) for w in N_out(v)),

a (1 - alpha)-contraction in the max norm. Iterating until the update drops
below ``tol * alpha`` leaves an error below ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_alpha, check_graph, check_tol, check_vertex, check_vertex_set
from .graph import Graph


@dataclass(frozen=True)
class PprVector:
    target: int
    values: np.ndarray
    alpha: float
    tol: float
    iterations: int = 0


@dataclass(frozen=True)
class RestrictedPprVector:
    target: int
    blocked: frozenset
    values: np.ndarray
    alpha: float
    tol: float


class _OutMean:
    """Mean of a vector over each vertex's out-neighbors.

    Rows that list every vertex exactly once reduce to the global mean,
    which keeps dense graphs cheap.
    """

    def __init__(self, g: Graph):
        self.n = g.n
        full = g.full_out_rows()
        self.full = np.flatnonzero(full)
        self.rows = np.flatnonzero(~full)
        starts = g.out_ptr[self.rows]
        ends = g.out_ptr[self.rows + 1]
        lengths = ends - starts
        if len(self.rows) == len(full):
            self.idx = g.out_idx.astype(np.int64)
        else:
            pieces = [g.out_idx[s:e] for s, e in zip(starts, ends)]
            self.idx = np.concatenate(pieces).astype(np.int64) if pieces else np.zeros(0, np.int64)
        self.offsets = np.zeros(len(self.rows), dtype=np.int64)
        if len(lengths) > 1:
            np.cumsum(lengths[:-1], out=self.offsets[1:])
        self.deg = lengths.astype(np.float64)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(x)
        if len(self.full):
            out[self.full] = x.sum(axis=0) / self.n
        if len(self.rows):
            sums = np.add.reduceat(x[self.idx], self.offsets, axis=0)
            if x.ndim == 1:
                out[self.rows] = sums / self.deg
            else:
                out[self.rows] = sums / self.deg[:, None]
        return out


def _max_iterations(alpha: float, tol: float) -> int:
    return int(math.ceil(math.log(tol * alpha / 2) / math.log1p(-alpha))) + 50


def _solve(g: Graph, alpha: float, base: np.ndarray, tol: float, fixed=None, fixed_vals=None):
    mean = _OutMean(g)
    x = base.copy()
    if fixed is not None:
        x[fixed] = fixed_vals
    limit = _max_iterations(alpha, tol)
    for it in range(1, limit + 1):
        nxt = base + (1.0 - alpha) * mean(x)
        if fixed is not None:
            nxt[fixed] = fixed_vals
        delta = float(np.max(np.abs(nxt - x))) if x.size else 0.0
        x = nxt
        if delta < tol * alpha:
            return x, it
    raise RuntimeError(f"fixed-point iteration did not reach tol={tol} in {limit} steps")


def exact_ppr(g: Graph, t: int, alpha: float = 0.2, tol: float = 1e-12) -> PprVector:
    """``pi(v, t)`` for every ``v``, accurate to ``tol`` in the max norm."""
    g = check_graph(g)
    alpha, tol = check_alpha(alpha), check_tol(tol)
    t = check_vertex(g, t, "target")
    base = np.zeros(g.n)
    base[t] = alpha
    x, it = _solve(g, alpha, base, tol)
    np.clip(x, 0.0, 1.0, out=x)
    return PprVector(t, x, alpha, tol, it)


def exact_pagerank(g: Graph, t: int, alpha: float = 0.2, tol: float = 1e-12) -> float:
    """PageRank centrality ``pi(t)``: the mean of ``pi(v, t)`` over all ``v``."""
    return float(exact_ppr(g, t, alpha, tol).values.mean())


def exact_ppr_matrix(g: Graph, alpha: float = 0.2, tol: float = 1e-12) -> np.ndarray:
    """Dense matrix with entry ``[s, v] = pi(s, v)``. Small graphs only."""
    g = check_graph(g)
    alpha, tol = check_alpha(alpha), check_tol(tol)
    x, _ = _solve(g, alpha, alpha * np.eye(g.n), tol)
    return np.clip(x, 0.0, 1.0)


def exact_restricted_ppr(g: Graph, t: int, U, alpha: float = 0.2, tol: float = 1e-12) -> RestrictedPprVector:
    """Set-avoiding PPR ``pi(v, not U, t)``.

    Walks die on entering ``U``, including at step 0, so the value is zero
    for ``v`` in ``U`` and everywhere when ``t`` is in ``U``.
    """
    g = check_graph(g)
    alpha, tol = check_alpha(alpha), check_tol(tol)
    t = check_vertex(g, t, "target")
    U = check_vertex_set(g, U, "blocked set")
    if t in U:
        return RestrictedPprVector(t, U, np.zeros(g.n), alpha, tol)
    base = np.zeros(g.n)
    base[t] = alpha
    blocked = np.fromiter(sorted(U), dtype=np.int64, count=len(U))
    x, _ = _solve(g, alpha, base, tol, blocked, 0.0)
    return RestrictedPprVector(t, U, np.clip(x, 0.0, 1.0), alpha, tol)


def exact_through_set_ppr(g: Graph, t: int, U, alpha: float = 0.2, tol: float = 1e-12) -> np.ndarray:
    """``pi(v, U, t)``: walks that visit ``U`` at least once, then end at ``t``.

    Solved independently of :func:`exact_restricted_ppr`: inside ``U`` the
    value is the unrestricted ``pi(v, t)``, outside it is the discounted mean
    over out-neighbors with no termination credit.
    """
    g = check_graph(g)
    alpha, tol = check_alpha(alpha), check_tol(tol)
    U = check_vertex_set(g, U, "set")
    if not U:
        return np.zeros(g.n)
    full = exact_ppr(g, t, alpha, tol / 2).values
    inside = np.fromiter(sorted(U), dtype=np.int64, count=len(U))
    x, _ = _solve(g, alpha, np.zeros(g.n), tol / 2, inside, full[inside])
    return np.clip(x, 0.0, 1.0)


def ppr_residual(g: Graph, vec: PprVector) -> float:
    """Max violation of the fixed-point equation by ``vec``."""
    base = np.zeros(g.n)
    base[vec.target] = vec.alpha
    lhs = base + (1.0 - vec.alpha) * _OutMean(g)(vec.values)
    return float(np.max(np.abs(lhs - vec.values)))
