import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from portmatch.graph import (AlternatingPath, Matching, NodeWeightedBipartiteGraph,
                             PathKind, find_augment_or_absorb, flip,
                             graph_from_voq, input_port, matching_weight,
                             output_port, symmetric_difference, threshold)
from portmatch.clearance import clearance_example
from portmatch import oracle


def voq_matrices(max_dim=4, max_entry=6):
    return st.integers(1, max_dim).flatmap(
        lambda n1: st.integers(1, max_dim).flatmap(
            lambda n2: st.lists(
                st.lists(st.integers(0, max_entry), min_size=n2, max_size=n2),
                min_size=n1, max_size=n1)))


# --- graph_from_voq ---------------------------------------------------------

def test_graph_from_empty_voq():
    g = graph_from_voq([[0]])
    assert g.n_inputs == 1 and g.n_outputs == 1
    assert g.edges == ()
    assert g.input_weights == [0] and g.output_weights == [0]


def test_graph_from_adversarial_instance():
    g = graph_from_voq(clearance_example(4))
    assert g.input_weights == [3, 3, 3, 3]
    assert g.output_weights == [4, 4, 4, 0]


def test_graph_from_small_matrix():
    g = graph_from_voq([[2, 1], [0, 1]])
    assert set(g.edges) == {(0, 0), (0, 1), (1, 1)}
    assert g.input_weights == [3, 1]
    assert g.output_weights == [2, 2]


def test_graph_rejects_negative_entries():
    with pytest.raises(ValueError):
        graph_from_voq([[1, -1]])


@given(voq_matrices())
def test_graph_weight_totals_agree(mat):
    g = graph_from_voq(mat)
    total = sum(sum(row) for row in mat)
    assert sum(g.input_weights) == total
    assert sum(g.output_weights) == total


# --- matching basics --------------------------------------------------------

def test_matching_rejects_shared_ports():
    with pytest.raises(ValueError):
        Matching([(0, 0), (0, 1)])
    with pytest.raises(ValueError):
        Matching([(0, 0), (1, 0)])


def test_matching_weight_examples():
    g = graph_from_voq([[2, 1], [0, 1]])
    assert matching_weight(g, Matching()) == 0
    assert matching_weight(g, Matching([(0, 0)])) == 3 + 2

    g4 = graph_from_voq(clearance_example(4))
    assert matching_weight(g4, Matching([(1, 0), (2, 1), (3, 2)])) == 21


def test_threshold_examples():
    g = graph_from_voq([[1, 1], [1, 1]])
    assert threshold(g, Matching([(0, 0), (1, 1)])) == 1  # perfect

    g2 = graph_from_voq(clearance_example(4))
    assert g2.max_weight() == 4
    assert threshold(g2, Matching()) == 5  # nothing matched

    g0 = NodeWeightedBipartiteGraph(2, 2, [(0, 0)], [0, 0], [0, 0])
    assert threshold(g0, Matching()) == 1  # no positive-weight ports


# --- symmetric difference ---------------------------------------------------

def test_symmetric_difference_identical():
    m = Matching([(0, 0), (1, 1)])
    assert symmetric_difference(m, m) == []


def test_symmetric_difference_single_edge():
    comps = symmetric_difference(Matching([(0, 0)]), Matching())
    assert len(comps) == 1
    assert not comps[0].is_cycle
    assert comps[0].edge_pairs() == [(0, 0)]


def test_symmetric_difference_cycle():
    comps = symmetric_difference(Matching([(0, 0), (1, 1)]),
                                 Matching([(0, 1), (1, 0)]))
    assert len(comps) == 1
    assert comps[0].is_cycle
    assert len(comps[0].nodes) == 4  # even cycle


@given(voq_matrices(), st.integers(0, 2 ** 30), st.integers(0, 2 ** 30))
@settings(max_examples=60, deadline=None)
def test_symmetric_difference_structure(mat, seed_a, seed_b):
    import numpy as np
    from portmatch.policies import random_maximal

    g = graph_from_voq(mat)
    m1 = random_maximal(g, np.random.default_rng(seed_a))
    m2 = random_maximal(g, np.random.default_rng(seed_b))
    comps = symmetric_difference(m1, m2)
    sd = set(m1.pairs) ^ set(m2.pairs)
    seen_nodes = set()
    seen_edges = []
    for comp in comps:
        assert not (set(comp.nodes) & seen_nodes)  # node-disjoint
        seen_nodes.update(comp.nodes)
        pairs = comp.edge_pairs()
        if comp.is_cycle:
            assert len(pairs) % 2 == 0
        membership = [p in m1 for p in pairs]
        assert all(a != b for a, b in zip(membership, membership[1:]))
        seen_edges.extend(pairs)
    assert sorted(seen_edges) == sorted(sd)
    assert len(seen_edges) == len(set(seen_edges))


# --- flip -------------------------------------------------------------------

def _two_input_graph(with_j=True, w_a=5, w_b=2):
    # inputs: a=0, b=1; outputs: i=0 (and j=1); edge (b, i) is matchable
    edges = [(0, 0), (1, 0)]
    out_w = [3]
    n_out = 1
    if with_j:
        edges.append((1, 1))
        out_w = [3, 1]
        n_out = 2
    return NodeWeightedBipartiteGraph(2, n_out, edges, [w_a, w_b], out_w)


def test_flip_single_free_edge():
    path = AlternatingPath((input_port(0), output_port(0)), PathKind.AUGMENTING)
    assert flip(Matching(), path) == Matching([(0, 0)])


def test_flip_absorbing_swaps_lighter_port():
    m = Matching([(1, 0)])  # (b, i)
    path = AlternatingPath((input_port(0), output_port(0), input_port(1)),
                           PathKind.ABSORBING)
    assert flip(m, path) == Matching([(0, 0)])  # (a, i)


def test_flip_augmenting_through_matched_edge():
    m = Matching([(1, 0)])  # (b, i)
    path = AlternatingPath(
        (input_port(0), output_port(0), input_port(1), output_port(1)),
        PathKind.AUGMENTING)
    assert flip(m, path) == Matching([(0, 0), (1, 1)])  # (a,i), (b,j)


def test_flip_rejects_bad_paths():
    m = Matching([(1, 0)])
    # wrong parity for its kind
    bad = AlternatingPath((input_port(0), output_port(0), input_port(1)),
                          PathKind.AUGMENTING)
    with pytest.raises(ValueError):
        flip(m, bad)
    # starts at a matched port
    bad2 = AlternatingPath((input_port(1), output_port(0)), PathKind.AUGMENTING)
    with pytest.raises(ValueError):
        flip(m, bad2)
    # alternation broken: first edge already in the matching
    bad3 = AlternatingPath((output_port(0), input_port(1)), PathKind.AUGMENTING)
    with pytest.raises(ValueError):
        flip(Matching([(1, 0)]), bad3)


# --- path search ------------------------------------------------------------

def test_search_single_edge_augmenting():
    g = graph_from_voq([[1]])
    path = find_augment_or_absorb(g, Matching(), input_port(0))
    assert path is not None and path.kind is PathKind.AUGMENTING
    assert path.nodes == (input_port(0), output_port(0))


def test_search_finds_absorbing_when_no_augment():
    g = _two_input_graph(with_j=False)  # no free output anywhere
    path = find_augment_or_absorb(g, Matching([(1, 0)]), input_port(0))
    assert path is not None and path.kind is PathKind.ABSORBING
    assert path.nodes == (input_port(0), output_port(0), input_port(1))


def test_search_prefers_augmenting():
    g = _two_input_graph(with_j=True)
    path = find_augment_or_absorb(g, Matching([(1, 0)]), input_port(0))
    assert path is not None and path.kind is PathKind.AUGMENTING


def test_search_isolated_port_returns_none():
    g = NodeWeightedBipartiteGraph(2, 1, [(0, 0)], [2, 3], [2])
    assert find_augment_or_absorb(g, Matching([(0, 0)]), input_port(1)) is None


def test_search_rejects_matched_start():
    g = graph_from_voq([[1]])
    with pytest.raises(ValueError):
        find_augment_or_absorb(g, Matching([(0, 0)]), input_port(0))


@given(voq_matrices(max_dim=3, max_entry=4), st.integers(0, 2 ** 30))
@settings(max_examples=80, deadline=None)
def test_search_agrees_with_exhaustive_enumeration(mat, seed):
    import numpy as np
    from portmatch.policies import random_maximal

    g = graph_from_voq(mat)
    rng = np.random.default_rng(seed)
    base = random_maximal(g, rng)
    # drop a random subset of pairs to get a non-maximal matching
    kept = [p for p in base.pairs if rng.random() < 0.6]
    m = Matching(kept)
    for p in g.ports():
        if m.matches(p):
            continue
        fast = find_augment_or_absorb(g, m, p)
        slow = oracle.has_augment_or_absorb(g, m, p)
        assert (fast is not None) == slow


@given(voq_matrices(max_dim=4, max_entry=5), st.integers(0, 2 ** 30))
@settings(max_examples=80, deadline=None)
def test_flip_weight_and_size_accounting(mat, seed):
    import numpy as np
    from portmatch.policies import random_maximal

    g = graph_from_voq(mat)
    rng = np.random.default_rng(seed)
    kept = [p for p in random_maximal(g, rng).pairs if rng.random() < 0.5]
    m = Matching(kept)
    for p in g.ports():
        if m.matches(p):
            continue
        path = find_augment_or_absorb(g, m, p)
        if path is None:
            continue
        flipped = flip(m, path)
        dw = matching_weight(g, flipped) - matching_weight(g, m)
        if path.kind is PathKind.AUGMENTING:
            assert dw == g.weight(path.start) + g.weight(path.end)
            assert len(flipped) == len(m) + 1
        else:
            assert dw == g.weight(path.start) - g.weight(path.end)
            assert dw > 0
            assert len(flipped) == len(m)
