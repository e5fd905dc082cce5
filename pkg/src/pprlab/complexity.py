"""Instance complexity: the cost ``T_r`` of the vertices with ``pi(v, t) >= r``
and its max-min trade-off ``T*`` against ``r / pi(t)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_graph, check_vertex
from .exact import PprVector, exact_ppr
from .graph import Graph


@dataclass(frozen=True)
class ComplexityProfile:
    """Step function ``r -> T_r`` with its maximizer.

    ``breakpoints`` are the distinct positive PPR values in descending order
    and ``T_at[k]`` is ``T_r`` at ``r = breakpoints[k]`` (inclusive).
    """

    target: int
    breakpoints: np.ndarray
    T_at: np.ndarray
    pagerank: float
    r_star: float
    T_star: float
    total: int

    def T(self, r: float) -> int:
        """``T_r`` for an arbitrary ``r``."""
        if r <= 0.0:
            return self.total
        # number of breakpoints >= r, via the ascending view
        k = len(self.breakpoints) - int(np.searchsorted(self.breakpoints[::-1], r, side="left"))
        return int(self.T_at[k - 1]) if k else 0

    def objective(self, r: float) -> float:
        return min(self.T(r), r / self.pagerank)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "pagerank": self.pagerank,
            "r_star": self.r_star,
            "T_star": self.T_star,
            "breakpoints": self.breakpoints.tolist(),
            "T_at": self.T_at.tolist(),
        }


def compute_profile(g: Graph, t: int, ppr: PprVector | None = None, alpha: float = 0.2,
                    tol: float = 1e-12) -> ComplexityProfile:
    """Exact ``T*`` from the PPR column of ``t`` (computed if not given)."""
    g = check_graph(g)
    t = check_vertex(g, t, "target")
    if ppr is None:
        ppr = exact_ppr(g, t, alpha, tol)
    elif ppr.target != t or len(ppr.values) != g.n:
        raise ValueError("ppr vector does not belong to this graph and target")
    vals = np.asarray(ppr.values)
    pagerank = float(vals.mean())
    pos = np.flatnonzero(vals > 0.0)
    weights = 1 + g.in_degrees[pos]
    order = np.argsort(-vals[pos], kind="stable")
    sorted_vals = vals[pos][order]
    cum = np.cumsum(weights[order])
    # last index of each run of equal values gives the inclusive prefix sum
    last = np.flatnonzero(np.append(sorted_vals[1:] != sorted_vals[:-1], True))
    breakpoints = sorted_vals[last]
    T_at = cum[last].astype(np.int64)

    ratio = breakpoints / pagerank
    at_point = np.minimum(T_at, ratio)
    # just above a breakpoint T_r falls to the previous prefix sum
    exclusive = np.concatenate([[0], T_at[:-1]])
    above = np.minimum(exclusive, ratio)
    k = int(np.argmax(at_point))
    best, r_star = float(at_point[k]), float(breakpoints[k])
    if len(above) and above.max() > best:
        k = int(np.argmax(above))
        best, r_star = float(above[k]), float(breakpoints[k])
    return ComplexityProfile(t, breakpoints, T_at, pagerank, r_star, best, int(g.n + g.m))


def grid_T_star(profile: ComplexityProfile, points: int = 10_000) -> float:
    """Brute-force ``max_r min(T_r, r / pi(t))`` over a uniform grid in ``(0, 1]``."""
    rs = np.arange(1, points + 1) / points
    asc = profile.breakpoints[::-1]
    counts = len(asc) - np.searchsorted(asc, rs, side="left")
    T = np.where(counts > 0, profile.T_at[np.maximum(counts - 1, 0)], 0)
    return float(np.max(np.minimum(T, rs / profile.pagerank)))
