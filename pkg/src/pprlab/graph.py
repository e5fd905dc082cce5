"""Directed graph storage, the query oracle, and visit accounting.

Adjacency is kept in CSR form in both directions. Slot order matters: the
oracle's ``IN(v, i)``/``OUT(v, i)`` index into it, so graphs loaded from text
are sorted by vertex id while graph surgery edits slots in place.
"""

from __future__ import annotations

import io
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

QUERY_KINDS = ("INDEG", "OUTDEG", "IN", "OUT", "JUMP")


class GraphFormatError(ValueError):
    """Malformed edge-list input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class OracleIndexError(IndexError):
    pass


def _index_dtype(n: int, m: int):
    # uint16 halves memory on dense graphs (complete graph on 2^14 vertices)
    if m > 1 << 24 and n <= 1 << 16:
        return np.uint16
    return np.int64


def _csr(n: int, rows: np.ndarray, cols: np.ndarray, dtype) -> tuple[np.ndarray, np.ndarray]:
    counts = np.bincount(rows, minlength=n) if len(rows) else np.zeros(n, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, cols.astype(dtype, copy=False)


class Graph:
    """Immutable directed multigraph on vertices ``0..n-1``.

    Parameters are CSR arrays; use :meth:`from_edges` or :func:`load_graph`
    rather than calling the constructor directly.

    Attributes
    ----------
    n, m : int
        Vertex and edge counts.
    out_ptr, out_idx, in_ptr, in_idx : ndarray
        CSR adjacency in both directions.
    loops : ndarray of bool
        Vertices that received a self-loop from dangling normalization.
    """

    def __init__(self, n, out_ptr, out_idx, in_ptr, in_idx, loops=None, normalized=None):
        self.n = int(n)
        self.out_ptr = out_ptr
        self.out_idx = out_idx
        self.in_ptr = in_ptr
        self.in_idx = in_idx
        self.m = int(len(out_idx))
        self.loops = np.zeros(self.n, dtype=bool) if loops is None else np.asarray(loops, dtype=bool)
        self._out_deg = np.diff(out_ptr)
        self._in_deg = np.diff(in_ptr)
        if normalized is None:
            normalized = bool(self.n == 0 or self._out_deg.min() >= 1)
        self.normalized = normalized
        self._full_rows = None
        for a in (self.out_ptr, self.out_idx, self.in_ptr, self.in_idx, self.loops):
            a.flags.writeable = False

    # construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges, normalize: bool = True) -> "Graph":
        """Build a graph with adjacency lists sorted by vertex id."""
        n = int(n)
        if n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={n}")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(e) and (e.min() < 0 or e.max() >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        loops = np.zeros(n, dtype=bool)
        if normalize:
            outdeg = np.bincount(e[:, 0], minlength=n) if len(e) else np.zeros(n, dtype=np.int64)
            dangling = np.flatnonzero(outdeg == 0)
            if len(dangling):
                loops[dangling] = True
                e = np.concatenate([e, np.stack([dangling, dangling], axis=1)])
        dtype = _index_dtype(n, len(e))
        order = np.lexsort((e[:, 1], e[:, 0]))
        out_ptr, out_idx = _csr(n, e[order, 0], e[order, 1], dtype)
        order = np.lexsort((e[:, 0], e[:, 1]))
        in_ptr, in_idx = _csr(n, e[order, 1], e[order, 0], dtype)
        return cls(n, out_ptr, out_idx, in_ptr, in_idx, loops, normalized=normalize or None)

    @classmethod
    def from_lists(cls, out_lists: Sequence[Sequence[int]], in_lists: Sequence[Sequence[int]], loops=None) -> "Graph":
        """Build a graph preserving the given slot order in both directions."""
        n = len(out_lists)
        if len(in_lists) != n:
            raise ValueError("out_lists and in_lists disagree on n")
        check = Counter()
        for u, lst in enumerate(out_lists):
            for v in lst:
                check[(u, v)] += 1
        for v, lst in enumerate(in_lists):
            for u in lst:
                check[(u, v)] -= 1
        bad = [k for k, c in check.items() if c]
        if bad:
            raise ValueError(f"in/out adjacency inconsistent at edge {bad[0]}")
        m = sum(len(lst) for lst in out_lists)
        dtype = _index_dtype(n, m)

        def pack(lists):
            ptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum([len(lst) for lst in lists], out=ptr[1:])
            idx = np.fromiter((v for lst in lists for v in lst), dtype=np.int64, count=int(ptr[-1]))
            return ptr, idx.astype(dtype, copy=False)

        out_ptr, out_idx = pack(out_lists)
        in_ptr, in_idx = pack(in_lists)
        return cls(n, out_ptr, out_idx, in_ptr, in_idx, loops)

    # accessors ----------------------------------------------------------

    @property
    def out_degrees(self) -> np.ndarray:
        return self._out_deg

    @property
    def in_degrees(self) -> np.ndarray:
        return self._in_deg

    def out_degree(self, v: int) -> int:
        return int(self._out_deg[v])

    def in_degree(self, v: int) -> int:
        return int(self._in_deg[v])

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[v]:self.out_ptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[v]:self.in_ptr[v + 1]]

    def edges(self) -> np.ndarray:
        """All edges as an ``(m, 2)`` array in out-slot order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self._out_deg)
        return np.stack([src, self.out_idx.astype(np.int64)], axis=1)

    def to_lists(self) -> tuple[list[list[int]], list[list[int]]]:
        out = [self.out_neighbors(v).tolist() for v in range(self.n)]
        inn = [self.in_neighbors(v).tolist() for v in range(self.n)]
        return out, inn

    def raw_edges(self) -> np.ndarray:
        """Edges without the self-loops added by dangling normalization."""
        e = self.edges()
        if not self.loops.any():
            return e
        drop = (e[:, 0] == e[:, 1]) & self.loops[e[:, 0]]
        return e[~drop]

    def full_out_rows(self) -> np.ndarray:
        """Mask of vertices whose out-list is exactly ``0..n-1`` in order."""
        if self._full_rows is None:
            n = self.n
            mask = self._out_deg == n
            rows = np.flatnonzero(mask)
            ref = np.arange(n, dtype=self.out_idx.dtype)
            for v in np.flatnonzero(mask):
                s = self.out_ptr[v]
                if not np.array_equal(self.out_idx[s:s + n], ref):
                    mask[v] = False
            self._full_rows = mask
        return self._full_rows

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, normalized={self.normalized})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.out_ptr, other.out_ptr)
            and np.array_equal(self.out_idx, other.out_idx)
            and np.array_equal(self.in_ptr, other.in_ptr)
            and np.array_equal(self.in_idx, other.in_idx)
        )

    __hash__ = None


# edge-list I/O ----------------------------------------------------------


def _parse_ints(text: str, lineno: int) -> tuple[int, int]:
    parts = text.split()
    if len(parts) != 2:
        raise GraphFormatError(f"expected two integers, got {text!r}", lineno)
    try:
        a, b = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphFormatError(f"non-integer token in {text!r}", lineno) from None
    return a, b


def loads(text: str, normalize: bool = True) -> Graph:
    """Parse edge-list text: header ``"n m"`` then ``m`` lines ``"u v"``."""
    header = None
    header_text = None
    edges = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        a, b = _parse_ints(line, lineno)
        if header is None:
            if a < 1 or b < 0:
                raise GraphFormatError(f"bad header {line!r}: need n >= 1, m >= 0", lineno)
            header, header_text = (a, b), line
            continue
        n, m = header
        if len(edges) == m:
            if line == header_text:
                raise GraphFormatError("duplicate header", lineno)
            raise GraphFormatError(f"more edge lines than the {m} declared", lineno)
        if not (0 <= a < n and 0 <= b < n):
            raise GraphFormatError(f"vertex id out of range for n={n}: {line!r}", lineno)
        edges.append((a, b))
    if header is None:
        raise GraphFormatError("missing header line")
    if len(edges) != header[1]:
        raise GraphFormatError(f"header declares {header[1]} edges, found {len(edges)}")
    return Graph.from_edges(header[0], np.array(edges, dtype=np.int64).reshape(-1, 2), normalize=normalize)


def load_graph(source, normalize: bool = True) -> Graph:
    """Load a graph from a path or an open text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return loads(fh.read(), normalize=normalize)
    return loads(source.read(), normalize=normalize)


def dumps(g: Graph, include_loops: bool = False) -> str:
    """Serialize to edge-list text. Normalization loops are omitted by default."""
    e = g.edges() if include_loops else g.raw_edges()
    buf = [f"{g.n} {len(e)}"]
    buf.extend(f"{u} {v}" for u, v in e.tolist())
    return "\n".join(buf) + "\n"


def save_graph(g: Graph, path, include_loops: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(g, include_loops=include_loops))


# oracle and query accounting ------------------------------------------


@dataclass
class QueryLog:
    """Per-run query counters and, with ``detail=True``, the full transcript.

    Counts are always kept. Visited vertices, visited pairs and the
    transcript cost memory proportional to the number of queries, so they are
    only recorded in detail mode.
    """

    detail: bool = False
    counts: Counter = field(default_factory=Counter)
    visited_vertices: set = field(default_factory=set)
    visited_pairs: set = field(default_factory=set)
    transcript: list = field(default_factory=list)

    def record(self, kind: str, args: tuple, answer: int) -> None:
        self.counts[kind] += 1
        if not self.detail:
            return
        self.transcript.append((kind, args, answer))
        if kind in ("IN", "OUT"):
            v = args[0]
            self.visited_pairs.add((v, answer) if v <= answer else (answer, v))
            self.visited_vertices.add(v)
            self.visited_vertices.add(answer)
        elif kind == "JUMP":
            self.visited_vertices.add(answer)
        else:
            self.visited_vertices.add(args[0])

    def bump(self, kind: str, k: int) -> None:
        """Count ``k`` queries of one kind without recording them (fast paths)."""
        if self.detail:
            raise RuntimeError("bulk counting would desynchronize a detailed transcript")
        self.counts[kind] += int(k)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def totals(self) -> dict:
        return {k: int(self.counts.get(k, 0)) for k in QUERY_KINDS}

    def touches(self, vertices: Iterable[int] = (), pairs: Iterable[tuple[int, int]] = ()) -> bool:
        if not self.detail:
            raise RuntimeError("visit sets are only tracked with detail=True")
        if any(int(v) in self.visited_vertices for v in vertices):
            return True
        return any((min(a, b), max(a, b)) in self.visited_pairs for a, b in pairs)


class Oracle:
    """Unit-cost graph access: INDEG, OUTDEG, IN, OUT (1-based) and JUMP."""

    def __init__(self, graph: Graph, log: QueryLog | None = None):
        self.graph = graph
        self.log = QueryLog() if log is None else log

    @property
    def n(self) -> int:
        return self.graph.n

    def indeg(self, v: int) -> int:
        d = self.graph.in_degree(v)
        self.log.record("INDEG", (v,), d)
        return d

    def outdeg(self, v: int) -> int:
        d = self.graph.out_degree(v)
        self.log.record("OUTDEG", (v,), d)
        return d

    def in_(self, v: int, i: int) -> int:
        d = self.graph.in_degree(v)
        if not 1 <= i <= d:
            raise OracleIndexError(f"IN({v}, {i}) with in-degree {d}")
        u = int(self.graph.in_idx[self.graph.in_ptr[v] + i - 1])
        self.log.record("IN", (v, i), u)
        return u

    def out(self, v: int, i: int) -> int:
        d = self.graph.out_degree(v)
        if not 1 <= i <= d:
            raise OracleIndexError(f"OUT({v}, {i}) with out-degree {d}")
        w = int(self.graph.out_idx[self.graph.out_ptr[v] + i - 1])
        self.log.record("OUT", (v, i), w)
        return w

    def jump(self, draw: Callable[[int], int] | np.random.Generator) -> int:
        """Uniform vertex; ``draw`` maps ``n`` to an integer in ``[0, n)``."""
        if isinstance(draw, np.random.Generator):
            v = int(draw.integers(self.n))
        else:
            v = int(draw(self.n))
        if not 0 <= v < self.n:
            raise OracleIndexError(f"JUMP draw {v} outside [0, {self.n})")
        self.log.record("JUMP", (), v)
        return v


def transcripts_equal(t1: Sequence, t2: Sequence) -> bool:
    """Same length and identical ``(kind, args, answer)`` entries in order."""
    if len(t1) != len(t2):
        return False
    return all(a == b for a, b in zip(t1, t2))
