"""Estimator-style wrappers: ``fit`` takes a graph, ``predict`` takes targets.

``fit`` accepts a :class:`~pprlab.graph.Graph` or an ``(m, 2)`` integer edge
array (vertex count ``max id + 1``). Per-target run reports from the last
``predict`` call are kept in ``reports_``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._random import to_seed
from ._validation import check_alpha, check_graph, check_tol, check_vertex
from .estimators import adaptive_pagerank, bidirectional_ppr, instance_smart
from .exact import exact_ppr
from .walks import Mode


def _targets(g, targets) -> list[int]:
    arr = np.atleast_1d(np.asarray(targets))
    if arr.ndim != 1 or not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("targets must be an integer vertex id or a 1-D array of them")
    return [check_vertex(g, int(t), "target") for t in arr]


class _GraphEstimator(BaseEstimator):
    def fit(self, X, y=None):
        self._check_params()
        self.graph_ = check_graph(X)
        self.n_vertices_ = self.graph_.n
        return self

    def _check_params(self):
        check_alpha(self.alpha)

    def predict(self, targets) -> np.ndarray:
        check_is_fitted(self, "graph_")
        ts = _targets(self.graph_, targets)
        self.reports_ = [self._run(t) for t in ts]
        return np.array([self._value(r) for r in self.reports_], dtype=float)

    def _value(self, report) -> float:
        return report.estimate


class AdaptivePageRank(_GraphEstimator):
    """Adaptive bidirectional estimate of ``pi(t)``.

    Parameters
    ----------
    alpha : float, default=0.2
        Walk termination probability.
    mode : {"full", "pairwise"}, default="full"
        Walk randomness family.
    random_state : int, Generator, RandomState or None
        Master seed; an int is used as the seed directly.
    """

    def __init__(self, alpha=0.2, mode="full", random_state=None):
        self.alpha = alpha
        self.mode = mode
        self.random_state = random_state

    def _check_params(self):
        super()._check_params()
        Mode(self.mode)

    def _run(self, t):
        return adaptive_pagerank(self.graph_, t, self.alpha, to_seed(self.random_state), mode=self.mode)


class BidirectionalPageRank(_GraphEstimator):
    """Fixed-threshold push followed by ``n_walks`` walks."""

    def __init__(self, alpha=0.2, r_max=1e-3, n_walks=10_000, mode="full", random_state=None):
        self.alpha = alpha
        self.r_max = r_max
        self.n_walks = n_walks
        self.mode = mode
        self.random_state = random_state

    def _check_params(self):
        super()._check_params()
        Mode(self.mode)
        if not 0.0 < self.r_max <= 1.0:
            raise ValueError(f"r_max must lie in (0, 1], got {self.r_max!r}")

    def _run(self, t):
        return bidirectional_ppr(self.graph_, t, self.r_max, self.n_walks, to_seed(self.random_state),
                                 self.alpha, self.mode)


class InstanceSmartPageRank(AdaptivePageRank):
    """Degree-``n`` shortcut in front of :class:`AdaptivePageRank`."""

    def _run(self, t):
        return instance_smart(self.graph_, t, self.alpha, to_seed(self.random_state), mode=self.mode)


class ExactPageRank(_GraphEstimator):
    """Reference values from the fixed-point solver."""

    def __init__(self, alpha=0.2, tol=1e-12):
        self.alpha = alpha
        self.tol = tol

    def _check_params(self):
        super()._check_params()
        check_tol(self.tol)

    def _run(self, t):
        return exact_ppr(self.graph_, t, self.alpha, self.tol)

    def _value(self, report) -> float:
        return float(report.values.mean())
