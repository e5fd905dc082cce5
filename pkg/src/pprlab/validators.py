"""Randomized numerical checks of the structural bounds the estimators rely on.

Each check returns a :class:`CheckResult` with the worst observed margin, so
callers can report how close a bound came to failing, not just whether it did.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complexity import compute_profile
from .estimators import adaptive_pagerank
from .exact import exact_ppr, exact_ppr_matrix, exact_restricted_ppr, exact_through_set_ppr
from .graph import Graph
from .lab import mu_of_U, remove_in_edges, subdivide_edge
from .push import increase_push_budget, log2n, push_init

TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    trials: int = 0
    violations: int = 0
    worst: float = -math.inf
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.trials > 0

    def observe(self, excess: float, note: str | None = None) -> None:
        """Record one comparison; ``excess > 0`` is a violation."""
        self.worst = max(self.worst, float(excess))
        if excess > 0:
            self.violations += 1
            if note is not None and len(self.notes) < 5:
                self.notes.append(note)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "trials": self.trials,
                "violations": self.violations, "worst_excess": self.worst, "notes": list(self.notes)}


def random_digraph(rng: np.random.Generator, n_min: int = 2, n_max: int = 20, p: float | None = None) -> Graph:
    """Erdos-Renyi style digraph; self-loops allowed, dangling vertices normalized."""
    n = int(rng.integers(n_min, n_max + 1))
    p = float(rng.uniform(0.05, 0.4)) if p is None else p
    mask = rng.random((n, n)) < p
    return Graph.from_edges(n, np.argwhere(mask))


# push invariants ------------------------------------------------------------------


def check_push_invariants(graphs: int = 200, n_max: int = 50, alpha: float = 0.2, seed: int = 0,
                          rounds: int = 12) -> list[CheckResult]:
    """Push invariant residual, reserve sandwich, residue cap, per-round push count,
    pushes-above-threshold and monotonicity, under random push orders."""
    rng = np.random.default_rng(seed)
    inv = CheckResult("push invariant residual <= 1e-9")
    sandwich = CheckResult("p(s) <= pi(s,t) <= p(s) + r_max")
    cap = CheckResult("r(v) < 2 r_push / alpha")
    per_round = CheckResult("pushes per vertex per round <= (3/alpha) log2 n")
    above = CheckResult("every push had r(v) >= r_push")
    mono = CheckResult("p non-decreasing and r_push non-increasing")
    budget = CheckResult("cost over first i rounds <= 2^i")
    for _ in range(graphs):
        g = random_digraph(rng, 10, n_max)
        t = int(rng.integers(g.n))
        M = exact_ppr_matrix(g, alpha)
        col = M[:, t]
        last = {"p": np.zeros(g.n), "r_push": 1.0}

        def observe(state):
            resid = np.max(np.abs(col - state.p - M @ state.r))
            inv.trials += 1
            inv.observe(resid - TOL, f"n={g.n} t={t} residual={resid:.3g}")
            sandwich.trials += 1
            sandwich.observe(max(np.max(state.p - col), np.max(col - state.p - state.r_max)) - TOL)
            cap.trials += 1
            cap.observe(state.r_max - 2 * state.r_push / alpha,
                        f"n={g.n} r_max={state.r_max:.3g} r_push={state.r_push:.3g}")
            mono.trials += 1
            mono.observe(max(float(np.max(last["p"] - state.p)), state.r_push - last["r_push"]))
            last["p"] = state.p.copy()
            last["r_push"] = state.r_push

        state = push_init(g, t, alpha, selector=np.random.default_rng(rng.integers(2**63)), observer=observe)
        observe(state)
        bound = 3 / alpha * log2n(g.n)
        for i in range(1, rounds + 1):
            increase_push_budget(state, 2 ** (i - 1))
            per_round.trials += 1
            per_round.observe(state.round_max_pushes[-1] - bound, f"n={g.n} round {i}")
            budget.trials += 1
            budget.observe(state.cost_spent - 2 ** i)
            if state.stalled:
                break
        above.trials += 1
        above.observe(state.low_residue_pushes)
    return [inv, sandwich, cap, per_round, above, mono, budget]


# lemma checks on exact values -----------------------------------------------------


def check_subdivision(trials: int = 100, alpha: float = 0.2, seed: int = 0) -> CheckResult:
    """Subdividing an edge lowers any PPR value by at most a factor ``2 - alpha``."""
    rng = np.random.default_rng(seed)
    res = CheckResult("subdivision ratio <= 2 - alpha")
    while res.trials < trials:
        g = random_digraph(rng, 2, 20)
        e = g.edges()
        u, v = (int(x) for x in e[rng.integers(len(e))])
        h, _ = subdivide_edge(g, u, v)
        before = exact_ppr_matrix(g, alpha)
        after = exact_ppr_matrix(h, alpha)[: g.n, : g.n]
        mask = before > 1e-12
        ratio = np.max(before[mask] / after[mask])
        res.trials += 1
        res.observe(ratio - (2 - alpha) - TOL, f"edge ({u},{v}) ratio={ratio:.12g}")
    return res


def check_set_avoiding(trials: int = 100, alpha: float = 0.2, seed: int = 0) -> CheckResult:
    """``max(pi(s, not U, t), pi(mu(U), not U, t)) >= (alpha/2) pi(s, t)`` for all ``s``."""
    rng = np.random.default_rng(seed)
    res = CheckResult("set-avoiding bound >= (alpha/2) pi(s,t)")
    while res.trials < trials:
        g = random_digraph(rng, 4, 20)
        t = int(rng.integers(g.n))
        size = int(rng.integers(1, min(5, g.n - 1) + 1))
        others = np.setdiff1d(np.arange(g.n), [t])
        U = set(rng.choice(others, size=size, replace=False).tolist())
        if not {int(w) for u in U for w in g.out_neighbors(u)} - U:
            continue
        mu = mu_of_U(g, U, t, alpha)
        avoid = exact_restricted_ppr(g, t, U, alpha).values
        full = exact_ppr(g, t, alpha).values
        lhs = np.maximum(avoid, avoid[mu])
        res.trials += 1
        res.observe(float(np.max(alpha / 2 * full - lhs)) - TOL, f"n={g.n} t={t} U={sorted(U)}")
    return res


def check_in_edge_removal(trials: int = 100, alpha: float = 0.2, seed: int = 0) -> CheckResult:
    """Removing in-edges of ``v`` keeps ``pi(v, t)`` and ``pi(v, not U, t)`` above
    ``alpha`` times their old values."""
    rng = np.random.default_rng(seed)
    res = CheckResult("in-edge removal ratios >= alpha")
    while res.trials < trials:
        g = random_digraph(rng, 3, 20)
        v = int(rng.integers(g.n))
        t = v if rng.random() < 0.2 else int(rng.integers(g.n))
        ins = g.in_neighbors(v).tolist()
        k = int(rng.integers(0, len(ins) + 1))
        chosen = rng.choice(len(ins), size=k, replace=False).tolist() if k else []
        h, _ = remove_in_edges(g, v, [(ins[j], v) for j in chosen])
        size = int(rng.integers(0, min(4, g.n) + 1))
        U = set(rng.choice(g.n, size=size, replace=False).tolist())
        old = exact_ppr(g, t, alpha).values[v]
        new = exact_ppr(h, t, alpha).values[v]
        old_u = exact_restricted_ppr(g, t, U, alpha).values[v]
        new_u = exact_restricted_ppr(h, t, U, alpha).values[v]
        res.trials += 1
        res.observe(max(alpha * old - new, alpha * old_u - new_u) - TOL, f"n={g.n} v={v} t={t}")
    return res


def check_decomposition(trials: int = 100, alpha: float = 0.2, seed: int = 0,
                        tol: float = 1e-12) -> CheckResult:
    """``pi(v, t) = pi(v, U, t) + pi(v, not U, t)`` within ``2 tol``."""
    rng = np.random.default_rng(seed)
    res = CheckResult("PPR splits into through-U and avoiding-U parts")
    while res.trials < trials:
        g = random_digraph(rng, 2, 20)
        t = int(rng.integers(g.n))
        U = set(rng.choice(g.n, size=int(rng.integers(0, g.n + 1)), replace=False).tolist())
        full = exact_ppr(g, t, alpha, tol).values
        split = exact_restricted_ppr(g, t, U, alpha, tol).values + exact_through_set_ppr(g, t, U, alpha, tol)
        res.trials += 1
        res.observe(float(np.max(np.abs(full - split))) - 2 * tol)
    return res


# round sandwich ----------------------------------------------------------------------


def round_sandwich_excess(profile, n: int, alpha: float, i: int, r_push: float) -> tuple[float, float]:
    """Excess of each side of ``T_{2 r_push} <= 2^i <= (3/alpha) log2 n T_{alpha r_push}``.

    Thresholds are nudged by ``1e-10`` in the bound's favour to absorb solver error
    in PPR values lying exactly on a threshold.
    """
    low = profile.T(2 * r_push + 1e-10) - 2 ** i
    high = 2 ** i - 3 / alpha * log2n(n) * profile.T(max(alpha * r_push - 1e-10, 1e-300))
    return float(low), float(high)


def check_round_sandwich(cases, runs: int = 5, alpha: float = 0.2, seed: int = 0) -> CheckResult:
    """Check both round-end complexity bounds on every round of adaptive runs.

    ``cases`` is an iterable of ``(name, graph, target)``.
    """
    res = CheckResult("T_{2 r_push} <= 2^i <= (3/alpha) log2 n T_{alpha r_push}")
    for name, g, t in cases:
        prof = compute_profile(g, t, alpha=alpha)
        for k in range(runs):
            rep = adaptive_pagerank(g, t, alpha, seed=seed + k)
            for rec in rep.rounds:
                low, high = round_sandwich_excess(prof, g.n, alpha, rec.round, rec.r_push)
                res.trials += 1
                res.observe(max(low, high), f"{name} round {rec.round} low={low:g} high={high:g}")
    return res


def lemma_suite(seed: int = 0, trials: int = 100, alpha: float = 0.2) -> list[CheckResult]:
    """Everything the CLI ``validate --suite lemmas`` command reports."""
    from .lab import generate

    results = [
        check_subdivision(trials, alpha, seed),
        check_set_avoiding(trials, alpha, seed),
        check_in_edge_removal(trials, alpha, seed),
        check_decomposition(trials, alpha, seed),
    ]
    results.extend(check_push_invariants(max(20, trials // 5), 50, alpha, seed))
    cases = [(f"{kind}-256", generate(kind, 256, seed), 255 if kind == "path" else 0)
             for kind in ("path", "star", "complete", "random")]
    results.append(check_round_sandwich(cases, runs=3, alpha=alpha, seed=seed))
    return results
