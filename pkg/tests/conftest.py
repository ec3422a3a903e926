import sys

import numpy as np
import pytest
from scipy.special import expit

from activerank.estimators import ReducibleChainError, check_arc_preconditions
from activerank.model import ComparisonGraph


def bt_graph(theta, pairs_k, rng):
    """Comparison graph with ``k`` BT draws for each ``((i, j), k)`` in ``pairs_k``."""
    g = ComparisonGraph(len(theta))
    for (i, j), k in pairs_k:
        wins_i = int((rng.random(k) < expit(theta[i] - theta[j])).sum())
        if wins_i:
            g.record_outcome(i, j, wins_i)
        if k - wins_i:
            g.record_outcome(j, i, k - wins_i)
    return g


def random_connected_instance(rng, n, density=1.0, k=None, theta_scale=1.0):
    """Resample until the comparison digraph is strongly connected."""
    while True:
        theta = rng.normal(0, theta_scale, n)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
        kk = k if k is not None else int(rng.integers(3, 25))
        g = bt_graph(theta, [(p, kk) for p in pairs], rng)
        if g.num_edges == 0:
            continue
        try:
            check_arc_preconditions(g)
        except ReducibleChainError:
            continue
        return theta, g


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_item_graph():
    g = ComparisonGraph(2)
    for _ in range(3):
        g.record_outcome(0, 1)
    g.record_outcome(1, 0)
    return g


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.REPORT):
        terminalreporter.write_line(line)
