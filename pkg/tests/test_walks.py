import numpy as np
import pytest

from conftest import dense_ppr, random_graph
from pprlab.graph import QueryLog, loads
from pprlab.lab import generate
from pprlab.push import increase_push_budget, push_init
from pprlab.walks import (Mode, WalkRandomness, WalkStream, mc_value, monte_carlo, sample_terminals,
                          sample_walk, walk_cap)

MODES = [Mode.FULL, Mode.PAIRWISE]


@pytest.mark.parametrize("mode", MODES)
def test_singleton_always_terminates_at_itself(mode):
    g = loads("1 0\n")
    assert set(sample_terminals(g, 0, WalkRandomness(3, mode), 1000).tolist()) == {0}


@pytest.mark.parametrize("mode", MODES)
def test_same_walk_id_same_terminal(mode):
    g = generate("random", 50, 1)
    rand = WalkRandomness(99, mode)
    assert [sample_walk(g, 4, rand, j) for j in range(20)] == [sample_walk(g, 4, rand, j) for j in range(20)]


@pytest.mark.parametrize("mode", MODES)
def test_path_termination_frequency(mode):
    alpha, n = 0.2, 6
    g = generate("path", n)
    for d in (0, 1, 3, 5):
        term = sample_terminals(g, n - 1 - d, WalkRandomness(7 + d, mode), 100_000, alpha)
        p = (1 - alpha) ** d
        freq = np.mean(term == n - 1)
        assert abs(freq - p) <= 4 * np.sqrt(p * (1 - p) / 100_000) + 1e-12


@pytest.mark.parametrize("mode", MODES)
def test_termination_frequencies_match_exact_ppr(mode):
    rng = np.random.default_rng(3)
    g = random_graph(rng, 8, 12)
    M = np.clip(dense_ppr(g), 0.0, 1.0)  # dense solve can return -1e-17 for unreachable pairs
    q = 100_000
    for s in range(3):
        counts = np.bincount(sample_terminals(g, s, WalkRandomness(11 + s, mode), q), minlength=g.n)
        freq = counts / q
        se = np.sqrt(M[s] * (1 - M[s]) / q)
        assert np.all(np.abs(freq - M[s]) <= 4 * se + 1e-12)


@pytest.mark.parametrize("mode", MODES)
def test_compiled_and_reference_paths_agree(mode):
    g = generate("random", 80, 4)
    rand = WalkRandomness(2024, mode)
    fast = WalkStream(g, rand)
    slow = WalkStream(g, rand, log=QueryLog(detail=True))
    assert np.array_equal(fast.terminals(300), slow.terminals(300))
    assert fast.oracle.log.totals() == slow.oracle.log.totals()
    assert len(slow.oracle.log.transcript) == slow.oracle.log.total
    assert fast.total_steps == slow.total_steps
    for j in range(30):
        a = sample_walk(g, j % 80, rand, j)
        b = sample_walk(g, j % 80, rand, j, log=QueryLog(detail=True))
        assert a == b


def test_stream_reuses_earlier_walks():
    g = generate("random", 100, 2)
    s = WalkStream(g, WalkRandomness(5))
    first = s.terminals(64).copy()
    jumps = s.oracle.log.counts["JUMP"]
    longer = s.terminals(128)
    assert np.array_equal(longer[:64], first)
    assert s.oracle.log.counts["JUMP"] == jumps + 64
    s.terminals(100)
    assert s.oracle.log.counts["JUMP"] == jumps + 64


def test_modes_differ_and_seeds_differ():
    g = generate("random", 100, 2)
    a = WalkStream(g, WalkRandomness(5, Mode.FULL)).terminals(200)
    b = WalkStream(g, WalkRandomness(5, Mode.PAIRWISE)).terminals(200)
    c = WalkStream(g, WalkRandomness(6, Mode.FULL)).terminals(200)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_cap_never_fires():
    g = generate("complete", 64)
    s = WalkStream(g, WalkRandomness(1), alpha=0.05)
    s.terminals(50_000)
    assert s.capped == 0
    assert walk_cap(0.05) == 2000


def test_zero_residue_gives_reserve_mass():
    g = generate("path", 3)
    st = push_init(g, 2)
    st.r[:] = 0.0
    st.p[:] = [0.1, 0.2, 0.3]
    for seed in range(3):
        est = monte_carlo(st, WalkStream(g, WalkRandomness(seed)), 17)
        assert est.value == pytest.approx(0.2)


def test_fresh_state_counts_hits_on_target():
    g = generate("random", 40, 3)
    st = push_init(g, 5)
    stream = WalkStream(g, WalkRandomness(8))
    est = monte_carlo(st, stream, 500)
    assert est.value == pytest.approx(est.terminal_counts.get(5, 0) / 500)
    recomputed = st.reserve_mass() / g.n + sum(c * st.r[v] for v, c in est.terminal_counts.items()) / 500
    assert est.value == pytest.approx(recomputed)
    assert sum(est.terminal_counts.values()) == 500


def test_monte_carlo_rejects_zero_walks():
    g = generate("path", 3)
    with pytest.raises(ValueError):
        monte_carlo(push_init(g, 2), WalkStream(g, WalkRandomness(0)), 0)


@pytest.mark.parametrize("mode", MODES)
def test_unbiased_mid_push(mode):
    rng = np.random.default_rng(17)
    g = random_graph(rng, 30, 30, p=0.1)
    t = 0
    st = push_init(g, t)
    for i in range(1, 6):
        increase_push_budget(st, 2 ** (i - 1))
    exact = dense_ppr(g)[:, t].mean()
    q = 16
    xs = np.array([mc_value(st, WalkStream(g, WalkRandomness(1000 + k, mode)), q) for k in range(1000)])
    se = xs.std(ddof=1) / np.sqrt(len(xs))
    assert abs(xs.mean() - exact) <= 4 * se
    assert xs.var(ddof=1) <= 1.5 * st.r_max * exact / q
