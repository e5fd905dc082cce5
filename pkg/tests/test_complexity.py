import numpy as np
import pytest
from hypothesis import given, settings

from conftest import graphs, random_graph
from pprlab.complexity import compute_profile, grid_T_star
from pprlab.exact import exact_ppr
from pprlab.graph import loads
from pprlab.lab import generate


def test_singleton():
    p = compute_profile(loads("1 0\n"), 0)
    assert p.pagerank == pytest.approx(1.0)
    assert p.T_star == pytest.approx(1.0)


@pytest.mark.parametrize("k", [1, 4, 30])
def test_star_table_by_hand(k):
    g = generate("star", k + 1)
    p = compute_profile(g, 0)
    # the center keeps its own loop, so pi(t, t) = 1 and every leaf sits at 1 - alpha
    assert p.breakpoints.tolist() == pytest.approx([1.0, 0.8])
    assert p.T_at.tolist() == [1 + (k + 1), 1 + (k + 1) + k]
    pi_t = (1 + 0.8 * k) / (k + 1)
    assert p.pagerank == pytest.approx(pi_t)
    top, leaf = p.breakpoints
    assert p.T(top) == k + 2 and p.T(0.9) == k + 2 and p.T(leaf) == 2 * k + 2
    assert p.T(0.5) == 2 * k + 2 and p.T(1.5) == 0 and p.T(0.0) == p.total
    expected = max(min(k + 2, 1.0 / pi_t), min(2 * k + 2, 0.8 / pi_t))
    assert p.T_star == pytest.approx(expected)


def test_path_profile():
    n = 16
    g = generate("path", n)
    p = compute_profile(g, n - 1)
    assert len(p.breakpoints) == n
    assert np.all(np.diff(p.breakpoints) < 0)
    assert np.all(np.diff(p.T_at) > 0)
    assert p.T_at[-1] == p.total


def test_objective_at_reported_r_star_when_inclusive():
    g = generate("random", 60, 3)
    p = compute_profile(g, 0)
    assert p.objective(p.r_star) <= p.T_star + 1e-9


@given(graphs(n_max=10))
@settings(max_examples=40, deadline=None)
def test_bounds(g):
    for t in range(g.n):
        p = compute_profile(g, t)
        assert 1.0 - 1e-12 <= p.T_star <= g.n + g.m


def test_grid_agreement(rng):
    for _ in range(40):
        g = random_graph(rng, 2, 200, p=float(rng.uniform(0.01, 0.3)))
        t = int(rng.integers(g.n))
        p = compute_profile(g, t)
        grid = grid_T_star(p)
        slack = int((1 + g.in_degrees).max())
        assert grid - 1e-9 <= p.T_star <= grid + slack + 1e-9


def test_accepts_precomputed_vector_and_rejects_mismatch():
    g = generate("random", 30, 1)
    vec = exact_ppr(g, 2)
    assert compute_profile(g, 2, vec).T_star == compute_profile(g, 2).T_star
    with pytest.raises(ValueError):
        compute_profile(g, 3, vec)


def test_to_dict_round_trips_values():
    p = compute_profile(generate("star", 5), 0)
    d = p.to_dict()
    assert d["T_star"] == p.T_star and d["T_at"] == p.T_at.tolist()
