import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from activerank.model import (
    BTInstance,
    ComparisonGraph,
    InvalidArgumentError,
    Ranking,
    graph_stats,
    prob_win,
)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)


@pytest.mark.parametrize(
    "ti,tj,expected",
    [(0.0, 0.0, 0.5), (math.log(3), 0.0, 0.75), (0.0, math.log(3), 0.25)],
)
def test_prob_win_examples(ti, tj, expected):
    assert prob_win(ti, tj) == pytest.approx(expected, abs=1e-15)


@given(finite, finite)
def test_prob_win_complement(a, b):
    assert abs(prob_win(a, b) + prob_win(b, a) - 1.0) <= 1e-15


@given(finite, finite, st.floats(min_value=-20, max_value=20))
def test_prob_win_shift_invariant(a, b, c):
    assert prob_win(a + c, b + c) == pytest.approx(prob_win(a, b), abs=1e-12)


@given(st.floats(min_value=-10, max_value=10), st.floats(min_value=1e-3, max_value=5),
       st.floats(min_value=-10, max_value=10))
def test_prob_win_strictly_increasing(a, delta, b):
    assert prob_win(a + delta, b) > prob_win(a, b)


@pytest.mark.parametrize("gap", np.linspace(0.01, 30, 40))
def test_wrong_outcome_below_exponential_bound(gap):
    assert prob_win(0.0, gap) < math.exp(-gap)


def test_weights_equal_logistic_form():
    inst = BTInstance([1.2, -0.3, 0.4])
    w = inst.weights
    assert prob_win(1.2, -0.3) == pytest.approx(w[0] / (w[0] + w[1]), abs=1e-15)


def test_bt_instance_views():
    inst = BTInstance([2.0, 0.5, 1.0])
    assert inst.weights.max() == 1.0
    assert inst.canonical_theta.min() == 0.0
    assert inst.pi.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(inst.pi > 0)
    assert inst.dynamic_range == pytest.approx(math.exp(1.5))
    assert list(inst.true_order()) == [0, 2, 1]


@given(st.lists(st.floats(min_value=-30, max_value=30), min_size=1, max_size=20))
def test_bt_round_trips(theta):
    inst = BTInstance(theta)
    via_w = BTInstance.from_weights(inst.weights)
    via_pi = BTInstance.from_pi(inst.pi)
    np.testing.assert_allclose(via_w.canonical_theta, inst.canonical_theta, atol=1e-10)
    np.testing.assert_allclose(via_pi.canonical_theta, inst.canonical_theta, atol=1e-10)
    np.testing.assert_allclose(BTInstance.from_weights(inst.pi).weights, inst.weights, atol=1e-10)


@pytest.mark.parametrize("bad", [[], [np.inf], [0.0, np.nan]])
def test_bt_instance_rejects(bad):
    with pytest.raises(InvalidArgumentError):
        BTInstance(bad)


def test_record_single_outcome():
    g = ComparisonGraph(2).record_outcome(0, 1)
    assert g.k(0, 1) == 1
    assert g.A(1, 0) == 1 and g.A(0, 1) == 0
    assert g.a(0, 1) == 0 and g.a(1, 0) == 1


def test_record_ratios():
    g = ComparisonGraph(2)
    for _ in range(3):
        g.record_outcome(0, 1)
    g.record_outcome(1, 0)
    assert g.a(0, 1) == 0.25
    assert g.a(1, 0) == 0.75


def test_uncompared_pair_ratio_is_zero():
    g = ComparisonGraph(3).record_outcome(0, 1)
    assert g.a(0, 2) == 0 and g.a(2, 0) == 0 and g.k(1, 2) == 0


@pytest.mark.parametrize("winner,loser", [(1, 1), (0, 3), (-1, 0)])
def test_record_invalid(winner, loser):
    with pytest.raises(InvalidArgumentError):
        ComparisonGraph(3).record_outcome(winner, loser)


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda t: t[0] != t[1]),
                max_size=60))
def test_count_bookkeeping(outcomes):
    g = ComparisonGraph(6)
    for w, l in outcomes:
        g.record_outcome(w, l)
    assert g.num_outcomes == len(outcomes)
    for (i, j), (wi, wj) in g.pairs():
        assert g.A(i, j) + g.A(j, i) == g.k(i, j) == wi + wj
    bulk = ComparisonGraph.from_outcomes(6, [w for w, _ in outcomes], [l for _, l in outcomes])
    assert bulk == g


def test_relabel_preserves_directions():
    g = ComparisonGraph(3).record_outcome(0, 2).record_outcome(0, 2).record_outcome(1, 0)
    h = g.relabel([2, 0, 1])  # 0->2, 1->0, 2->1
    assert h.A(1, 2) == 2 and h.A(2, 1) == 0
    assert h.A(2, 0) == 1


def test_stats_complete_graph():
    g = ComparisonGraph(3).record_outcome(0, 1).record_outcome(1, 2).record_outcome(0, 2)
    s = graph_stats(g)
    assert (s.d_min, s.d_max, s.kappa) == (2, 2, 1.0)
    assert s.gamma == pytest.approx(1.5, abs=1e-12)


def test_stats_path_graph():
    g = ComparisonGraph(3).record_outcome(0, 1).record_outcome(2, 1)
    s = graph_stats(g)
    assert (s.d_min, s.d_max, s.kappa) == (1, 2, 2.0)
    assert s.connected


def test_stats_disconnected_and_empty():
    g = ComparisonGraph(4).record_outcome(0, 1).record_outcome(2, 3)
    s = graph_stats(g)
    assert s.gamma == 0.0 and not s.connected
    with pytest.raises(InvalidArgumentError):
        graph_stats(ComparisonGraph(3))


def test_stats_gamma_unavailable_for_large_graphs():
    n = 2001
    g = ComparisonGraph.from_outcomes(n, np.arange(n - 1), np.arange(1, n))
    assert graph_stats(g).gamma is None


def test_ranking_validation():
    r = Ranking.from_order([2, 0, 1])
    assert list(r.sigma) == [1, 2, 0]
    assert list(r.order) == [2, 0, 1]
    with pytest.raises(InvalidArgumentError):
        Ranking([0, 0, 1])
