import numpy as np
import pytest
from hypothesis import given, settings

from conftest import dense_ppr, graphs, random_graph
from pprlab.exact import (exact_pagerank, exact_ppr, exact_ppr_matrix, exact_restricted_ppr,
                          exact_through_set_ppr, ppr_residual)
from pprlab.graph import loads
from pprlab.lab import complete_graph, generate


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.5, 0.9])
def test_self_loop_singleton_is_one(alpha):
    assert exact_ppr(loads("1 1\n0 0\n"), 0, alpha).values[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.5])
def test_two_cycle_value(alpha):
    g = loads("2 2\n0 1\n1 0\n")
    assert exact_ppr(g, 1, alpha).values[1] == pytest.approx(1 / (2 - alpha), abs=1e-12)


@pytest.mark.parametrize("n", [1, 7, 64])
def test_complete_graph_is_uniform(n):
    assert exact_pagerank(complete_graph(n), 0) == pytest.approx(1 / n, rel=1e-10)


@pytest.mark.parametrize("n", [2, 10, 300])
def test_path_geometric_closed_form(n):
    alpha = 0.2
    vec = exact_ppr(generate("path", n), n - 1, alpha).values
    d = np.arange(n)[::-1]
    assert np.allclose(vec, (1 - alpha) ** d, atol=1e-10, rtol=0)
    closed = (1 - (1 - alpha) ** n) / alpha / n
    assert abs(vec.mean() - closed) <= 1e-10


@given(graphs())
@settings(max_examples=40, deadline=None)
def test_matches_dense_solve(g):
    M = dense_ppr(g)
    for t in range(g.n):
        vec = exact_ppr(g, t)
        assert np.max(np.abs(vec.values - M[:, t])) <= 1e-10
        assert vec.values[t] >= 0.2 - 1e-12
        assert exact_pagerank(g, t) >= 0.2 / g.n - 1e-12
        assert ppr_residual(g, vec) <= 1e-11
    assert np.allclose(exact_ppr_matrix(g), M, atol=1e-10)


def test_rejects_non_normalized_graph():
    with pytest.raises(ValueError, match="out-degree-0"):
        exact_ppr(loads("2 1\n0 1\n", normalize=False), 1)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 2])
def test_rejects_bad_alpha(bad):
    with pytest.raises(ValueError):
        exact_ppr(loads("1 0\n"), 0, bad)


def test_restricted_empty_set_equals_unrestricted(rng):
    g = random_graph(rng)
    assert np.allclose(exact_restricted_ppr(g, 0, set()).values, exact_ppr(g, 0).values, atol=1e-12)


def test_restricted_target_in_set_is_zero(rng):
    g = random_graph(rng, 3)
    assert not exact_restricted_ppr(g, 1, {1, 2}).values.any()


def test_restricted_chain_by_hand():
    g = loads("3 2\n0 1\n1 2\n")
    vals = exact_restricted_ppr(g, 2, {1}).values
    assert vals[0] == 0.0 and vals[1] == 0.0
    assert vals[2] == pytest.approx(exact_ppr(g, 2).values[2])


def test_restricted_never_exceeds_unrestricted_and_zero_on_set(rng):
    for _ in range(30):
        g = random_graph(rng, 3)
        t = int(rng.integers(g.n))
        U = set(rng.choice(g.n, size=2, replace=False).tolist())
        r = exact_restricted_ppr(g, t, U).values
        assert np.all(r <= exact_ppr(g, t).values + 1e-12)
        assert all(r[u] == 0 for u in U)


def test_decomposition_through_and_avoiding(rng):
    for _ in range(30):
        g = random_graph(rng, 2)
        t = int(rng.integers(g.n))
        U = set(rng.choice(g.n, size=int(rng.integers(0, g.n + 1)), replace=False).tolist())
        full = exact_ppr(g, t).values
        split = exact_restricted_ppr(g, t, U).values + exact_through_set_ppr(g, t, U)
        assert np.max(np.abs(full - split)) <= 2e-12


def test_restricted_against_dense_solve(rng):
    # walks that enter U die: remove U rows and solve on the rest
    for _ in range(20):
        g = random_graph(rng, 3)
        t = int(rng.integers(g.n))
        U = set(rng.choice(np.setdiff1d(np.arange(g.n), [t]), size=1).tolist())
        keep = np.array([v for v in range(g.n) if v not in U])
        P = np.zeros((g.n, g.n))
        for u, v in g.edges().tolist():
            P[u, v] += 1
        P /= P.sum(1, keepdims=True)
        Q = P[np.ix_(keep, keep)]
        e = (keep == t).astype(float) * 0.2
        sol = np.linalg.solve(np.eye(len(keep)) - 0.8 * Q, e)
        got = exact_restricted_ppr(g, t, U).values[keep]
        assert np.allclose(got, sol, atol=1e-10)
