"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array

from .graph import Graph


def check_alpha(alpha) -> float:
    if not isinstance(alpha, numbers.Real) or not 0.0 < float(alpha) < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return float(alpha)


def check_tol(tol) -> float:
    if not isinstance(tol, numbers.Real) or not float(tol) > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    return float(tol)


def check_vertex(g: Graph, v, name: str = "vertex") -> int:
    if not isinstance(v, numbers.Integral) or not 0 <= int(v) < g.n:
        raise ValueError(f"{name} must be an integer in [0, {g.n}), got {v!r}")
    return int(v)


def check_vertex_set(g: Graph, vertices, name: str = "vertex set") -> frozenset:
    out = frozenset(int(v) for v in vertices)
    bad = [v for v in out if not 0 <= v < g.n]
    if bad:
        raise ValueError(f"{name} contains out-of-range vertex {bad[0]}")
    return out


def check_graph(X, n_vertices: int | None = None, normalized: bool = True) -> Graph:
    """Accept a :class:`Graph` or an ``(m, 2)`` integer edge array.

    Edge arrays are turned into a graph on ``n_vertices`` vertices (default
    ``max id + 1``) with dangling normalization applied.
    """
    if isinstance(X, Graph):
        g = X
    else:
        edges = check_array(X, dtype=np.int64, ensure_min_samples=0, ensure_all_finite=True)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValueError(f"edge array must have shape (m, 2), got {edges.shape}")
        if n_vertices is None:
            n_vertices = int(edges.max()) + 1 if len(edges) else 1
        g = Graph.from_edges(n_vertices, edges, normalize=True)
    if normalized and not g.normalized:
        raise ValueError("graph has out-degree-0 vertices; load it with normalize=True")
    return g
