"""Graph generators and graph surgery.

Surgeries edit adjacency slots in place: replacing an endpoint keeps every
other ``IN(v, i)``/``OUT(v, i)`` answer unchanged, so an oracle run that never
looks at the edited region sees the same transcript before and after.
Vertices left without out-edges get a self-loop; vertices that gain a real
out-edge lose theirs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._random import derive_seed, stream_key, to_seed, uniform_index
from ._validation import check_alpha, check_graph, check_vertex, check_vertex_set
from .exact import exact_ppr, exact_restricted_ppr
from .graph import Graph, Oracle, QueryLog, _index_dtype
from .push import log2n


class GraphKind(str, enum.Enum):
    PATH = "path"
    COMPLETE = "complete"
    STAR = "star"
    MOSTLY_DEGREE_N = "mostly_degree_n"
    RANDOM = "random"


class SurgeryKind(str, enum.Enum):
    SUBDIVIDE = "subdivide"
    REMOVE_IN_EDGES = "remove_in_edges"
    REWIRE_W = "rewire_w"
    ADD_FUNNEL = "add_funnel"


@dataclass
class SurgeryRecord:
    """What a surgery changed. ``degrees_*`` hold ``(d_in, d_out)`` per vertex
    outside the edited set, for degree audits."""

    kind: SurgeryKind
    affected: dict = field(default_factory=dict)
    degrees_before: dict = field(default_factory=dict)
    degrees_after: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def norm(x):
            if isinstance(x, (set, frozenset)):
                return sorted(int(v) for v in x)
            if isinstance(x, tuple):
                return [norm(v) for v in x]
            if isinstance(x, (np.integer,)):
                return int(x)
            return x

        return {
            "kind": self.kind.value,
            "affected": {k: norm(v) for k, v in self.affected.items()},
            "degrees_preserved": self.degrees_before == self.degrees_after,
        }


# generators -------------------------------------------------------------


def default_target(kind: GraphKind | str, n: int) -> int:
    return n - 1 if GraphKind(kind) is GraphKind.PATH else 0


def _dense(n: int, rows: list[np.ndarray]) -> Graph:
    """Graph whose out-lists equal its in-lists (symmetric edge set)."""
    lengths = np.fromiter((len(r) for r in rows), dtype=np.int64, count=n)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lengths, out=ptr[1:])
    idx = np.concatenate(rows) if rows else np.zeros(0, np.int64)
    return Graph(n, ptr, idx, ptr, idx)


def complete_graph(n: int) -> Graph:
    """Every ordered pair including self-loops, so all degrees equal ``n``."""
    dtype = _index_dtype(n, n * n)
    row = np.arange(n, dtype=dtype)
    ptr = np.arange(n + 1, dtype=np.int64) * n
    idx = np.tile(row, n)
    return Graph(n, ptr, idx, ptr, idx)


def complete_minus_block(n: int, D) -> Graph:
    """Complete graph (with self-loops) minus every edge with both endpoints in ``D``.

    No size limit on ``D``; every vertex outside ``D`` keeps degree ``n``.
    ``D`` must leave at least one vertex outside it so no vertex is dangling.
    """
    D = np.unique(np.asarray(D, dtype=np.int64))
    if len(D) and (D[0] < 0 or D[-1] >= n):
        raise ValueError(f"deficient vertices must lie in [0, {n})")
    if len(D) >= n:
        raise ValueError("at least one vertex must stay outside the deficient set")
    dtype = _index_dtype(n, n * n)
    full = np.arange(n, dtype=dtype)
    in_d = np.zeros(n, dtype=bool)
    in_d[D] = True
    partial = full[~in_d]
    return _dense(n, [partial if in_d[v] else full for v in range(n)])


def mostly_degree_n_graph(n: int, deficient: int, seed=0) -> tuple[Graph, np.ndarray]:
    """:func:`complete_minus_block` on a random ``D`` with ``|D| < n / log2 n``.

    Returns the graph and the sorted deficient set.
    """
    if deficient < 1 or deficient >= n or deficient >= n / log2n(n):
        raise ValueError(f"need 1 <= deficient < n / log2 n, got deficient={deficient}, n={n}")
    rng = np.random.default_rng(derive_seed(to_seed(seed), "generator"))
    D = np.sort(rng.choice(n, size=deficient, replace=False))
    return complete_minus_block(n, D), D


def generate(kind: GraphKind | str, n: int, seed=0, *, deficient: int | None = None,
             avg_degree: float = 8.0) -> Graph:
    """Deterministic generator suite; ``seed`` only matters for random kinds."""
    kind = GraphKind(kind)
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if kind is GraphKind.PATH:
        edges = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)
        return Graph.from_edges(n, edges)
    if kind is GraphKind.STAR:
        edges = np.stack([np.arange(1, n), np.zeros(n - 1, dtype=np.int64)], axis=1)
        return Graph.from_edges(n, edges)
    if kind is GraphKind.COMPLETE:
        return complete_graph(n)
    if kind is GraphKind.MOSTLY_DEGREE_N:
        if deficient is None:
            deficient = max(1, int(math.isqrt(n) // 4))
        return mostly_degree_n_graph(n, deficient, seed)[0]
    if n < 2:
        return Graph.from_edges(n, np.zeros((0, 2), dtype=np.int64))
    if avg_degree <= 0:
        raise ValueError(f"avg_degree must be positive, got {avg_degree!r}")
    rng = np.random.default_rng(derive_seed(to_seed(seed), "generator"))
    m = int(round(n * avg_degree))
    u = rng.integers(0, n, size=m)
    v = (u + rng.integers(1, n, size=m)) % n
    edges = np.unique(np.stack([u, v], axis=1), axis=0)
    return Graph.from_edges(n, edges)


def deficient_vertices(g: Graph) -> np.ndarray:
    return np.flatnonzero((g.in_degrees != g.n) | (g.out_degrees != g.n))


# mutable adjacency for surgery ----------------------------------------------


class _Lists:
    def __init__(self, g: Graph):
        self.out, self.inn = g.to_lists()
        self.loops = g.loops.copy()

    @property
    def n(self) -> int:
        return len(self.out)

    def add_vertex(self) -> int:
        self.out.append([])
        self.inn.append([])
        self.loops = np.append(self.loops, False)
        return self.n - 1

    def drop_loop(self, v: int) -> None:
        if self.loops[v]:
            self.out[v].remove(v)
            self.inn[v].remove(v)
            self.loops[v] = False

    def renormalize(self, vertices) -> None:
        for v in vertices:
            if not self.out[v]:
                self.out[v].append(v)
                self.inn[v].append(v)
                self.loops[v] = True

    def graph(self) -> Graph:
        return Graph.from_lists(self.out, self.inn, self.loops)


def _has_edge(g: Graph, u: int, v: int) -> bool:
    return bool(np.any(g.out_neighbors(u) == v))


def _degree_snapshot(g: Graph, vertices) -> dict:
    return {int(v): (g.in_degree(v), g.out_degree(v)) for v in vertices}


# single-edge surgeries --------------------------------------------------------


def subdivide_edge(g: Graph, u: int, v: int) -> tuple[Graph, SurgeryRecord]:
    """Replace one edge ``(u, v)`` with ``(u, w), (w, v)`` through a new vertex ``w``."""
    g = check_graph(g)
    u, v = check_vertex(g, u, "u"), check_vertex(g, v, "v")
    if not _has_edge(g, u, v):
        raise ValueError(f"edge ({u}, {v}) does not exist")
    L = _Lists(g)
    w = L.add_vertex()
    L.out[u][L.out[u].index(v)] = w
    L.inn[v][L.inn[v].index(u)] = w
    L.out[w].append(v)
    L.inn[w].append(u)
    # a subdivided normalization loop becomes a pair of real edges
    L.loops[u] = False
    return L.graph(), SurgeryRecord(SurgeryKind.SUBDIVIDE, {"edge": (u, v), "new_vertex": w})


def remove_in_edges(g: Graph, v: int, subset) -> tuple[Graph, SurgeryRecord]:
    """Remove the listed in-edges ``(u, v)`` of ``v`` (one occurrence each)."""
    g = check_graph(g)
    v = check_vertex(g, v, "v")
    L = _Lists(g)
    sources = []
    for e in subset:
        u, head = (int(x) for x in e)
        if head != v or u not in L.inn[v]:
            raise ValueError(f"({u}, {head}) is not an in-edge of {v}")
        L.inn[v].remove(u)
        L.out[u].remove(v)
        if u == v:
            L.loops[v] = False
        sources.append(u)
    L.renormalize(sorted(set(sources)))
    return L.graph(), SurgeryRecord(SurgeryKind.REMOVE_IN_EDGES, {"vertex": v, "removed": tuple(sources)})


def mu_of_U(g: Graph, U, t: int, alpha: float = 0.2, tol: float = 1e-12) -> int:
    """Out-neighbor of ``U`` outside ``U`` with the largest ``U``-avoiding PPR to ``t``."""
    g = check_graph(g)
    t = check_vertex(g, t, "target")
    U = check_vertex_set(g, U, "U")
    if t in U:
        raise ValueError("target must lie outside U")
    cand = sorted({int(w) for u in U for w in g.out_neighbors(u)} - U)
    if not cand:
        raise ValueError("U has no out-neighbors outside itself")
    vals = exact_restricted_ppr(g, t, U, alpha, tol).values[cand]
    return cand[int(np.argmax(vals))]


# W rewiring --------------------------------------------------------------------


def split_W(W, eps: float) -> tuple[list[int], list[int]]:
    """Lowest ``ceil((eps/2)|W|)`` ids become isolated, the rest stay attached."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")
    Ws = sorted(W)
    k = math.ceil(eps / 2 * len(Ws))
    return Ws[:k], Ws[k:]


def build_G_minus(g: Graph, W, eps: float) -> tuple[Graph, SurgeryRecord]:
    """Drop edges inside ``W`` and move every edge between ``W`` and the rest
    onto ``W_ext``, leaving ``W_iso`` without edges (self-loops aside).

    Every vertex outside ``W`` keeps its in- and out-degree and every slot
    whose neighbor lies outside ``W``.
    """
    g = check_graph(g)
    W = check_vertex_set(g, W, "W")
    W_iso, W_ext = split_W(W, eps)
    inW = np.zeros(g.n, dtype=bool)
    inW[list(W)] = True
    limit = (1 - eps / 2) * len(W)
    L = _Lists(g)
    outside = [v for v in range(g.n) if not inW[v]]
    for v in outside:
        to_w = sum(1 for w in L.out[v] if inW[w])
        from_w = sum(1 for w in L.inn[v] if inW[w])
        if to_w >= limit or from_w >= limit:
            raise ValueError(
                f"vertex {v} has {to_w} edges to W and {from_w} from W; "
                f"both must stay below (1 - eps/2)|W| = {limit:g}")
    before = _degree_snapshot(g, outside)

    for w in W:
        L.out[w] = []
        L.inn[w] = []
        L.loops[w] = False
    cursor = {"in": 0, "out": 0}

    def pick(direction: str, taken: list[int]) -> int:
        # round-robin over W_ext, skipping members already adjacent when some are not
        start = cursor[direction]
        for off in range(len(W_ext)):
            cand = W_ext[(start + off) % len(W_ext)]
            if cand not in taken:
                cursor[direction] = start + off + 1
                return cand
        cursor[direction] = start + 1
        return W_ext[start % len(W_ext)]

    for v in outside:
        for k, w in enumerate(L.out[v]):
            if inW[w]:
                tgt = pick("in", L.out[v])
                L.out[v][k] = tgt
                L.inn[tgt].append(v)
        for k, w in enumerate(L.inn[v]):
            if inW[w]:
                src = pick("out", L.inn[v])
                L.inn[v][k] = src
                L.out[src].append(v)
    L.renormalize(sorted(W))
    gm = L.graph()
    rec = SurgeryRecord(SurgeryKind.REWIRE_W, {"W": frozenset(W), "W_iso": tuple(W_iso), "W_ext": tuple(W_ext),
                                               "eps": eps},
                        before, _degree_snapshot(gm, outside))
    return gm, rec


def build_G_plus(gminus: Graph, rec: SurgeryRecord, edge_xy: tuple[int, int], y_prime: int, t: int,
                 alpha: float = 0.2, tol: float = 1e-12) -> tuple[Graph, SurgeryRecord]:
    """Funnel ``W_iso`` into the better of ``(x, y)`` and ``(x', y')``.

    ``(x'', y'')`` is ``(x, y)`` when ``pi(y, t) >= pi(y', t)`` in ``gminus``,
    else ``(x', y')`` with ``x'`` the lowest-id in-neighbor of ``y'`` in
    ``W_ext``. The chosen edge is subdivided through ``x* = min(W_iso)`` and
    every other ``W_iso`` vertex gets the single out-edge ``(w, x*)``.
    """
    gminus = check_graph(gminus)
    alpha = check_alpha(alpha)
    if rec.kind is not SurgeryKind.REWIRE_W:
        raise ValueError("build_G_plus needs the record returned by build_G_minus")
    W = rec.affected["W"]
    W_iso, W_ext = list(rec.affected["W_iso"]), list(rec.affected["W_ext"])
    if not W_iso:
        raise ValueError("W_iso is empty")
    x, y = (check_vertex(gminus, a, n) for a, n in zip(edge_xy, ("x", "y")))
    y_prime = check_vertex(gminus, y_prime, "y_prime")
    t = check_vertex(gminus, t, "target")
    if {x, y, t} & W:
        raise ValueError("x, y and t must lie outside W")
    if not _has_edge(gminus, x, y):
        raise ValueError(f"edge ({x}, {y}) is not in G-minus")
    if y_prime in W:
        raise ValueError("y_prime must lie outside W")
    ext = set(W_ext)
    feeders = sorted(int(u) for u in gminus.in_neighbors(y_prime) if int(u) in ext)
    if not feeders:
        raise ValueError(f"y_prime={y_prime} has no in-neighbor in W_ext")
    x_prime = feeders[0]

    pi = exact_ppr(gminus, t, alpha, tol).values
    if pi[y] >= pi[y_prime]:
        x2, y2 = x, y
    else:
        x2, y2 = x_prime, y_prime
    x_star = W_iso[0]

    L = _Lists(gminus)
    for w in W_iso:
        L.drop_loop(w)
    L.drop_loop(x2)
    L.out[x2][L.out[x2].index(y2)] = x_star
    L.inn[y2][L.inn[y2].index(x2)] = x_star
    L.out[x_star].append(y2)
    L.inn[x_star].append(x2)
    for w in W_iso[1:]:
        L.out[w].append(x_star)
        L.inn[x_star].append(w)
    gp = L.graph()
    outside = [v for v in range(gminus.n) if v not in W]
    new = SurgeryRecord(SurgeryKind.ADD_FUNNEL,
                        {"x": x, "y": y, "x_prime": x_prime, "y_prime": y_prime,
                         "x2": x2, "y2": y2, "x_star": x_star, "W_iso": tuple(W_iso)},
                        _degree_snapshot(gminus, outside), _degree_snapshot(gp, outside))
    return gp, new


# mostly-degree-n test ------------------------------------------------------------


def smart_test_samples(n: int) -> int:
    """``ceil(log2(n)^(5/4))`` samples."""
    return max(1, math.ceil(log2n(n) ** 1.25))


def mostly_degree_n_test(g: Graph, samples: int, rng=0, log: QueryLog | None = None) -> bool:
    """True iff ``samples`` uniform vertices (with replacement) all have
    ``d_in = d_out = n``. Stops at the first failing sample."""
    g = check_graph(g)
    if int(samples) != samples or samples < 1:
        raise ValueError(f"samples must be a positive integer, got {samples!r}")
    oracle = Oracle(g, log)
    key = stream_key(to_seed(rng), 0)
    n = g.n
    for j in range(int(samples)):
        v = oracle.jump(lambda size: uniform_index(key, 8 * j, size))
        if oracle.indeg(v) != n or oracle.outdeg(v) != n:
            return False
    return True


def false_positive_bound(deficient_fraction: float, samples: int) -> float:
    """Chance that every sample misses a set of the given vertex fraction."""
    return (1.0 - deficient_fraction) ** samples
