import numpy as np
import pytest

from portmatch import oracle
from portmatch.checks import random_voq
from portmatch.graph import (Matching, NodeWeightedBipartiteGraph,
                             graph_from_voq, input_port, output_port,
                             threshold)


def complete_graph(n1, n2, weight=1):
    return graph_from_voq([[weight] * n2 for _ in range(n1)])


# --- enumeration ------------------------------------------------------------

def test_enumerate_edgeless():
    g = graph_from_voq([[0, 0], [0, 0]])
    assert list(oracle.enumerate_matchings(g)) == [Matching()]


def test_enumerate_single_edge():
    g = graph_from_voq([[1]])
    assert sorted(oracle.enumerate_matchings(g), key=lambda m: m.pairs) == [
        Matching(), Matching([(0, 0)])]


def test_enumerate_k22_has_seven_matchings():
    ms = list(oracle.enumerate_matchings(complete_graph(2, 2)))
    assert len(ms) == 7
    assert len(set(ms)) == 7


def test_enumerate_rejects_large_graphs():
    with pytest.raises(ValueError):
        list(oracle.enumerate_matchings(complete_graph(7, 7)))


# --- coverability and Hall witnesses ---------------------------------------

def test_can_cover_empty_set():
    assert oracle.can_cover(complete_graph(2, 2), [])


def test_can_cover_complete_graph_inputs():
    assert oracle.can_cover(complete_graph(2, 2), [input_port(0), input_port(1)])


def test_can_cover_pigeonhole_failure():
    g = graph_from_voq([[1], [1]])  # two inputs share the one output
    assert not oracle.can_cover(g, [input_port(0), input_port(1)])


def test_can_cover_rejects_mixed_sides():
    with pytest.raises(ValueError):
        oracle.can_cover(complete_graph(2, 2), [input_port(0), output_port(0)])


def test_hall_witness_none_when_coverable():
    assert oracle.hall_witness(complete_graph(2, 2),
                               [input_port(0), input_port(1)]) is None


def test_hall_witness_pigeonhole():
    g = graph_from_voq([[1], [1]])
    w = oracle.hall_witness(g, [input_port(0), input_port(1)])
    assert w is not None
    assert w.subset == {input_port(0), input_port(1)}
    assert w.neighborhood == {output_port(0)}


def test_hall_witness_deficiency_on_random_instances():
    rng = np.random.default_rng(11)
    found = 0
    for _ in range(200):
        g = graph_from_voq(random_voq(rng, max_ports=10))
        inputs = [input_port(i) for i in range(g.n_inputs)]
        w = oracle.hall_witness(g, inputs)
        if w is None:
            continue
        found += 1
        assert len(w.subset) >= len(w.neighborhood) + 1
        assert oracle._neighborhood(g, w.subset) == set(w.neighborhood)
    assert found > 0  # the sample must actually exercise deficient instances


# --- optimal threshold ------------------------------------------------------

def test_optimal_threshold_perfect_graph():
    assert oracle.optimal_threshold(complete_graph(3, 3)) == 1


def test_optimal_threshold_edgeless():
    g = NodeWeightedBipartiteGraph(2, 2, [], [4, 1], [3, 2])
    assert oracle.optimal_threshold(g) == 5


def test_optimal_threshold_all_zero():
    assert oracle.optimal_threshold(graph_from_voq([[0, 0], [0, 0]])) == 1


def test_optimal_threshold_with_weight_gap():
    # weights are {3, 5}: the weight-5 ports are coverable but the isolated
    # weight-3 output is not, so the best threshold sits in the gap at 4
    g = NodeWeightedBipartiteGraph(1, 2, [(0, 0)], [5], [5, 3])
    assert oracle.optimal_threshold(g) == 4
    assert min(threshold(g, m) for m in oracle.enumerate_matchings(g)) == 4


def test_optimal_threshold_matches_enumeration_on_random_instances():
    rng = np.random.default_rng(23)
    for _ in range(150):
        g = graph_from_voq(random_voq(rng, max_ports=10))
        brute = min(threshold(g, m) for m in oracle.enumerate_matchings(g))
        assert oracle.optimal_threshold(g) == brute


# --- predicates -------------------------------------------------------------

def test_predicates_on_perfect_matching():
    g = complete_graph(2, 2, weight=3)
    perfect = Matching([(0, 0), (1, 1)])
    assert oracle.is_lhpf(g, perfect)
    assert oracle.is_critical_port(g, perfect)
    assert oracle.is_mvm(g, perfect)


def test_empty_matching_misses_critical_port():
    g = graph_from_voq([[2, 1], [0, 1]])
    assert not oracle.is_critical_port(g, Matching())


def test_is_critical_vacuous_on_zero_graph():
    assert oracle.is_critical_port(graph_from_voq([[0]]), Matching())
