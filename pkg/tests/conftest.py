import numpy as np
import pytest
from hypothesis import strategies as st

from pprlab.graph import Graph


def dense_ppr(g: Graph, alpha: float = 0.2) -> np.ndarray:
    """Independent oracle: ``alpha (I - (1 - alpha) P)^-1`` by direct solve."""
    P = np.zeros((g.n, g.n))
    for u, v in g.edges().tolist():
        P[u, v] += 1.0
    P /= P.sum(axis=1, keepdims=True)
    return alpha * np.linalg.solve(np.eye(g.n) - (1 - alpha) * P, np.eye(g.n))


def random_graph(rng: np.random.Generator, n_min: int = 2, n_max: int = 20, p: float | None = None) -> Graph:
    n = int(rng.integers(n_min, n_max + 1))
    p = float(rng.uniform(0.05, 0.4)) if p is None else p
    return Graph.from_edges(n, np.argwhere(rng.random((n, n)) < p))


@st.composite
def graphs(draw, n_max: int = 12):
    n = draw(st.integers(1, n_max))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=4 * n))
    return Graph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance verdicts, one line per criterion, echoed after the run
VERDICTS: dict[int, str] = {}


def record_verdict(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]"
    VERDICTS[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[k])
