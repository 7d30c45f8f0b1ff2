from pathlib import Path

import numpy as np
import pytest

from pcn import CallGraph

DATA = Path(__file__).parent / "data"


def random_graph(n, mean_degree=3.0, seed=0, self_loops=True):
    """Uniform random directed multigraph with ``mean_degree * n`` calls."""
    rng = np.random.default_rng(seed)
    m = int(round(mean_degree * n))
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    edges = {}
    for s, d in zip(src.tolist(), dst.tolist()):
        if s == d and not self_loops:
            continue
        edges[(s, d)] = edges.get((s, d), 0) + 1
    return CallGraph(n, tuple(f"p{i}" for i in range(n)), edges)


def chung_lu_graph(n, in_weight, out_weight, mean_degree=3.0, seed=0):
    """Directed graph with callers drawn by ``out_weight`` and callees by
    ``in_weight``."""
    rng = np.random.default_rng(seed)
    m = int(round(mean_degree * n))
    src = rng.choice(n, m, p=out_weight / out_weight.sum())
    dst = rng.choice(n, m, p=in_weight / in_weight.sum())
    edges = {}
    for s, d in zip(src.tolist(), dst.tolist()):
        edges[(s, d)] = edges.get((s, d), 0) + 1
    return CallGraph(n, tuple(f"p{i}" for i in range(n)), edges)


def dense_google_oracle(g, alpha=0.85, reverse=False, weighted=False):
    """Google matrix built entry by entry from the edge dictionary."""
    n = g.n
    a = np.zeros((n, n))
    for (s, d), m in g.edges.items():
        frm, to = (d, s) if reverse else (s, d)
        a[to, frm] += m if weighted else 1.0
    s_mat = np.empty_like(a)
    for j in range(n):
        total = a[:, j].sum()
        s_mat[:, j] = a[:, j] / total if total > 0 else 1.0 / n
    return alpha * s_mat + (1.0 - alpha) / n


def dense_power_iteration(gm, tol=1e-15, max_iter=100_000):
    n = gm.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = gm @ x
        y /= y.sum()
        if np.abs(y - x).sum() < tol:
            return y
        x = y
    return x


@pytest.fixture
def chain():
    return CallGraph(2, ("f", "g"), {(0, 1): 1})


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        key = report.nodeid.split("::")[-1]
        # a failure in any phase wins over a later pass
        if _ACCEPTANCE.get(key) not in ("failed",):
            _ACCEPTANCE[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    words = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    for key in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{words[_ACCEPTANCE[key]]}  {key}")
