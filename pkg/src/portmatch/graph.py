"""Node-weighted bipartite graphs, matchings, and alternating-path search.

The graph model: input ports on one side, output ports on the other, an
edge wherever at least one packet waits, and every port weighted by its
total backlog. Matchings are improved through two kinds of alternating
paths: augmenting paths (odd length, both endpoints free; flipping grows
the matching) and absorbing paths (even length, from a free port to a
strictly lighter matched port; flipping trades the light port away).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence


class Side(Enum):
    """Partition label for a port."""

    INPUT = "in"
    OUTPUT = "out"


@dataclass(frozen=True)
class PortId:
    """A port identified by its side and index within that side."""

    side: Side
    index: int

    def sort_key(self) -> tuple[int, int]:
        # canonical ordering: inputs before outputs, then by index
        return (0 if self.side is Side.INPUT else 1, self.index)

    def __repr__(self) -> str:
        return f"{self.side.value}{self.index}"


def input_port(index: int) -> PortId:
    return PortId(Side.INPUT, index)


def output_port(index: int) -> PortId:
    return PortId(Side.OUTPUT, index)


class NodeWeightedBipartiteGraph:
    """Bipartite graph with non-negative integer port weights.

    Edges are (input, output) index pairs held in lexicographic order;
    every search in this module iterates edges and adjacency lists in that
    canonical order, which makes all derived matchings reproducible.
    """

    __slots__ = ("n_inputs", "n_outputs", "input_weights", "output_weights",
                 "edges", "adj_in", "adj_out", "_edge_set")

    def __init__(self, n_inputs: int, n_outputs: int,
                 edges: Iterable[tuple[int, int]],
                 input_weights: Sequence[int],
                 output_weights: Sequence[int]):
        if n_inputs < 0 or n_outputs < 0:
            raise ValueError("port counts must be non-negative")
        input_weights = [int(w) for w in input_weights]
        output_weights = [int(w) for w in output_weights]
        if len(input_weights) != n_inputs or len(output_weights) != n_outputs:
            raise ValueError("weight vectors must match the port counts")
        if any(w < 0 for w in input_weights) or any(w < 0 for w in output_weights):
            raise ValueError("port weights must be non-negative")
        edge_list = sorted({(int(i), int(j)) for (i, j) in edges})
        for (i, j) in edge_list:
            if not (0 <= i < n_inputs and 0 <= j < n_outputs):
                raise ValueError(f"edge ({i},{j}) out of range")
        self.n_inputs = n_inputs
        self.n_outputs = n_outputs
        self.input_weights = input_weights
        self.output_weights = output_weights
        self.edges = tuple(edge_list)
        self._edge_set = frozenset(edge_list)
        adj_in: list[list[int]] = [[] for _ in range(n_inputs)]
        adj_out: list[list[int]] = [[] for _ in range(n_outputs)]
        for (i, j) in edge_list:
            adj_in[i].append(j)
            adj_out[j].append(i)
        self.adj_in = adj_in
        self.adj_out = adj_out

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self._edge_set

    def weight(self, port: PortId) -> int:
        if port.side is Side.INPUT:
            return self.input_weights[port.index]
        return self.output_weights[port.index]

    def ports(self) -> Iterator[PortId]:
        for i in range(self.n_inputs):
            yield PortId(Side.INPUT, i)
        for j in range(self.n_outputs):
            yield PortId(Side.OUTPUT, j)

    def max_weight(self) -> int:
        best = 0
        if self.input_weights:
            best = max(best, max(self.input_weights))
        if self.output_weights:
            best = max(best, max(self.output_weights))
        return best

    def __repr__(self) -> str:
        return (f"NodeWeightedBipartiteGraph(n_inputs={self.n_inputs}, "
                f"n_outputs={self.n_outputs}, edges={len(self.edges)})")


def _graph_from_parts(n_inputs: int, n_outputs: int, edges: list,
                      input_weights: list, output_weights: list,
                      adj_in: list, adj_out: list) -> NodeWeightedBipartiteGraph:
    # trusted constructor for callers that built canonical parts themselves
    g = NodeWeightedBipartiteGraph.__new__(NodeWeightedBipartiteGraph)
    g.n_inputs = n_inputs
    g.n_outputs = n_outputs
    g.input_weights = input_weights
    g.output_weights = output_weights
    g.edges = tuple(edges)
    g._edge_set = frozenset(edges)
    g.adj_in = adj_in
    g.adj_out = adj_out
    return g


def graph_from_voq(voq) -> NodeWeightedBipartiteGraph:
    """Build the per-slot graph from a VOQ occupancy matrix.

    Accepts a VoqState or any nested sequence of non-negative integers.
    An edge (i, j) exists iff the queue holds at least one packet; port
    weights are the row and column sums.
    """
    row_sums = getattr(voq, "row_sums", None)
    if row_sums is not None:
        # VoqState keeps its sums current and its entries validated
        counts = voq.counts
        n_inputs, n_outputs = voq.n_inputs, voq.n_outputs
        adj_in = [[j for j, q in enumerate(row) if q > 0] for row in counts]
        adj_out: list[list[int]] = [[] for _ in range(n_outputs)]
        edges: list[tuple[int, int]] = []
        for i, row_adj in enumerate(adj_in):
            for j in row_adj:
                edges.append((i, j))
                adj_out[j].append(i)
        return _graph_from_parts(n_inputs, n_outputs, edges,
                                 list(row_sums), list(voq.col_sums),
                                 adj_in, adj_out)

    rows = [list(row) for row in voq]
    n_inputs = len(rows)
    n_outputs = len(rows[0]) if rows else 0
    input_weights = [0] * n_inputs
    output_weights = [0] * n_outputs
    edges = []
    adj_in = [[] for _ in range(n_inputs)]
    adj_out = [[] for _ in range(n_outputs)]
    for i, row in enumerate(rows):
        if len(row) != n_outputs:
            raise ValueError("VOQ matrix must be rectangular")
        row_total = 0
        for j, q in enumerate(row):
            q = int(q)
            if q < 0:
                raise ValueError(f"negative VOQ entry at ({i},{j})")
            if q > 0:
                edges.append((i, j))
                adj_in[i].append(j)
                adj_out[j].append(i)
                row_total += q
                output_weights[j] += q
        input_weights[i] = row_total
    return _graph_from_parts(n_inputs, n_outputs, edges,
                             input_weights, output_weights, adj_in, adj_out)


class Matching:
    """A set of (input, output) pairs with at most one pair per port."""

    __slots__ = ("pairs", "_by_input", "_by_output")

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        ordered = sorted({(int(i), int(j)) for (i, j) in pairs})
        by_input: dict[int, int] = {}
        by_output: dict[int, int] = {}
        for (i, j) in ordered:
            if i in by_input:
                raise ValueError(f"input {i} appears in more than one pair")
            if j in by_output:
                raise ValueError(f"output {j} appears in more than one pair")
            by_input[i] = j
            by_output[j] = i
        self.pairs = tuple(ordered)
        self._by_input = by_input
        self._by_output = by_output

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return self._pair_in(pair)

    def _pair_in(self, pair: tuple[int, int]) -> bool:
        i, j = pair
        return self._by_input.get(i) == j

    def __eq__(self, other) -> bool:
        return isinstance(other, Matching) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"Matching({list(self.pairs)})"

    def output_for(self, i: int) -> Optional[int]:
        return self._by_input.get(i)

    def input_for(self, j: int) -> Optional[int]:
        return self._by_output.get(j)

    def matches(self, port: PortId) -> bool:
        if port.side is Side.INPUT:
            return port.index in self._by_input
        return port.index in self._by_output

    def matched_inputs(self) -> Iterable[int]:
        return self._by_input.keys()

    def matched_outputs(self) -> Iterable[int]:
        return self._by_output.keys()


def _matching_from_sorted_pairs(pairs: list[tuple[int, int]]) -> Matching:
    # trusted constructor: pairs already sorted with all ports distinct
    m = Matching.__new__(Matching)
    m.pairs = tuple(pairs)
    m._by_input = {i: j for (i, j) in pairs}
    m._by_output = {j: i for (i, j) in pairs}
    return m


def validate_matching(g: NodeWeightedBipartiteGraph, m: Matching) -> None:
    """Raise ValueError unless every pair of ``m`` is an edge of ``g``."""
    for (i, j) in m.pairs:
        if not g.has_edge(i, j):
            raise ValueError(f"matching pair ({i},{j}) is not a graph edge")


def matching_weight(g: NodeWeightedBipartiteGraph, m: Matching) -> int:
    """Total weight of all ports matched by ``m`` (both endpoints count)."""
    iw = g.input_weights
    ow = g.output_weights
    return sum(iw[i] + ow[j] for (i, j) in m.pairs)


def threshold(g: NodeWeightedBipartiteGraph, m: Matching) -> int:
    """Lowest level l >= 1 such that ``m`` matches every port of weight >= l.

    Equal to one more than the heaviest unmatched port (1 when every
    positive-weight port is matched), so it never exceeds max weight + 1.
    """
    heaviest_unmatched = 0
    for i, w in enumerate(g.input_weights):
        if w > heaviest_unmatched and i not in m._by_input:
            heaviest_unmatched = w
    for j, w in enumerate(g.output_weights):
        if w > heaviest_unmatched and j not in m._by_output:
            heaviest_unmatched = w
    return heaviest_unmatched + 1


class PathKind(Enum):
    AUGMENTING = "augmenting"
    ABSORBING = "absorbing"


@dataclass(frozen=True)
class AlternatingPath:
    """A simple path whose edges alternate out of and into a matching.

    ``nodes`` alternate sides; the first node is always unmatched. An
    augmenting path has an odd number of edges and ends at an unmatched
    node; an absorbing path has an even number and ends at a matched node
    strictly lighter than the start.
    """

    nodes: tuple[PortId, ...]
    kind: PathKind

    @property
    def start(self) -> PortId:
        return self.nodes[0]

    @property
    def end(self) -> PortId:
        return self.nodes[-1]

    def edge_pairs(self) -> list[tuple[int, int]]:
        """Path edges normalized to (input index, output index)."""
        pairs = []
        for a, b in zip(self.nodes, self.nodes[1:]):
            if a.side is Side.INPUT:
                pairs.append((a.index, b.index))
            else:
                pairs.append((b.index, a.index))
        return pairs


def _check_path_against_matching(m: Matching, path: AlternatingPath) -> None:
    nodes = path.nodes
    if len(nodes) < 2:
        raise ValueError("alternating path needs at least one edge")
    if len(set(nodes)) != len(nodes):
        raise ValueError("alternating path must be simple")
    for a, b in zip(nodes, nodes[1:]):
        if a.side is b.side:
            raise ValueError("path nodes must alternate sides")
    if m.matches(nodes[0]):
        raise ValueError("path must start at an unmatched port")
    pairs = path.edge_pairs()
    for k, pair in enumerate(pairs):
        in_matching = m._pair_in(pair)
        if in_matching != (k % 2 == 1):
            raise ValueError(f"edge {pair} breaks the matched/unmatched alternation")
    n_edges = len(pairs)
    if path.kind is PathKind.AUGMENTING:
        if n_edges % 2 == 0:
            raise ValueError("augmenting path must have an odd number of edges")
        if m.matches(nodes[-1]):
            raise ValueError("augmenting path must end at an unmatched port")
    else:
        if n_edges % 2 == 1:
            raise ValueError("absorbing path must have an even number of edges")
        if not m.matches(nodes[-1]):
            raise ValueError("absorbing path must end at a matched port")


def flip(m: Matching, path: AlternatingPath) -> Matching:
    """Exchange the path's matched and unmatched edges.

    Augmenting: the result additionally matches both endpoints. Absorbing:
    the start endpoint replaces the end endpoint. Raises ValueError if the
    path does not alternate correctly relative to ``m`` or has the wrong
    endpoint status for its kind.
    """
    _check_path_against_matching(m, path)
    new_pairs = set(m.pairs)
    for pair in path.edge_pairs():
        if pair in new_pairs:
            new_pairs.remove(pair)
        else:
            new_pairs.add(pair)
    return Matching(new_pairs)


@dataclass(frozen=True)
class DifferenceComponent:
    """One connected component of a symmetric difference of two matchings."""

    nodes: tuple[PortId, ...]
    is_cycle: bool

    def edge_pairs(self) -> list[tuple[int, int]]:
        seq = list(self.nodes)
        if self.is_cycle:
            seq.append(self.nodes[0])
        pairs = []
        for a, b in zip(seq, seq[1:]):
            if a.side is Side.INPUT:
                pairs.append((a.index, b.index))
            else:
                pairs.append((b.index, a.index))
        return pairs


def symmetric_difference(m1: Matching, m2: Matching) -> list[DifferenceComponent]:
    """Decompose the edges in exactly one of the matchings.

    The result is a list of node-disjoint paths and even-length cycles;
    along every component the edges alternate between the two matchings.
    """
    sd = set(m1.pairs) ^ set(m2.pairs)
    if not sd:
        return []
    incident: dict[PortId, list[tuple[int, int]]] = {}
    for (i, j) in sorted(sd):
        incident.setdefault(input_port(i), []).append((i, j))
        incident.setdefault(output_port(j), []).append((i, j))

    visited: set[tuple[int, int]] = set()

    def other_end(edge: tuple[int, int], port: PortId) -> PortId:
        i, j = edge
        return output_port(j) if port.side is Side.INPUT else input_port(i)

    def walk(start: PortId, first_edge: tuple[int, int]) -> list[PortId]:
        nodes = [start]
        cur, edge = start, first_edge
        while True:
            visited.add(edge)
            cur = other_end(edge, cur)
            nodes.append(cur)
            nxt = [e for e in incident[cur] if e not in visited]
            if not nxt:
                return nodes
            edge = nxt[0]

    components: list[DifferenceComponent] = []
    endpoints = sorted((p for p, es in incident.items() if len(es) == 1),
                       key=PortId.sort_key)
    for p in endpoints:
        edge = incident[p][0]
        if edge in visited:
            continue
        nodes = walk(p, edge)
        components.append(DifferenceComponent(tuple(nodes), is_cycle=False))
    # whatever is left sits on cycles
    for port in sorted(incident, key=PortId.sort_key):
        pending = [e for e in incident[port] if e not in visited]
        if not pending:
            continue
        nodes = walk(port, pending[0])
        # the walk returns to its start; drop the duplicate closing node
        assert nodes[-1] == port
        components.append(DifferenceComponent(tuple(nodes[:-1]), is_cycle=True))
    return components


def _alternating_bfs(adj_same, weights_same, mate_same, mate_opp, root):
    """Low-level alternating search over mate arrays (-1 means unmatched).

    From the start side, non-matching edges lead out and matching edges
    lead back. Returns (kind, end_index, parent_opp, parent_same) where
    kind is "aug", "abs" or None; parents reconstruct the path. The first
    augmenting endpoint in breadth-first canonical order wins; otherwise
    the reachable matched same-side port of minimum weight strictly below
    the root's (ties by index) closes an absorbing path.
    """
    w_root = weights_same[root]
    parent_opp: dict[int, int] = {}
    parent_same: dict[int, int] = {root: -1}
    queue = deque([root])
    best: Optional[tuple[int, int]] = None  # (weight, same-side index)
    while queue:
        u = queue.popleft()
        matched_to = mate_same[u]
        for t in adj_same[u]:
            if t == matched_to or t in parent_opp:
                continue
            parent_opp[t] = u
            s2 = mate_opp[t]
            if s2 < 0:
                return "aug", t, parent_opp, parent_same
            if s2 not in parent_same:
                parent_same[s2] = t
                queue.append(s2)
                w2 = weights_same[s2]
                if w2 < w_root and (best is None or (w2, s2) < best):
                    best = (w2, s2)
    if best is None:
        return None, -1, parent_opp, parent_same
    return "abs", best[1], parent_opp, parent_same


def _mate_arrays(g: NodeWeightedBipartiteGraph,
                 m: Matching) -> tuple[list[int], list[int]]:
    mate_in = [-1] * g.n_inputs
    mate_out = [-1] * g.n_outputs
    for (i, j) in m.pairs:
        mate_in[i] = j
        mate_out[j] = i
    return mate_in, mate_out


def find_augment_or_absorb(g: NodeWeightedBipartiteGraph, m: Matching,
                           start: PortId) -> Optional[AlternatingPath]:
    """Search for an augmenting or absorbing path from an unmatched port.

    Breadth-first alternating search: non-matching edges leave the start
    side, matching edges return to it. The first augmenting path found in
    canonical edge order wins; failing that, the reachable matched port of
    minimum weight strictly below the start's weight (ties by index) yields
    an absorbing path; otherwise None.
    """
    if m.matches(start):
        raise ValueError(f"port {start} is already matched")
    mate_in, mate_out = _mate_arrays(g, m)
    if start.side is Side.INPUT:
        kind, end, parent_opp, parent_same = _alternating_bfs(
            g.adj_in, g.input_weights, mate_in, mate_out, start.index)
        same_side, opp_side = Side.INPUT, Side.OUTPUT
    else:
        kind, end, parent_opp, parent_same = _alternating_bfs(
            g.adj_out, g.output_weights, mate_out, mate_in, start.index)
        same_side, opp_side = Side.OUTPUT, Side.INPUT
    if kind is None:
        return None
    rev: list[PortId] = []
    cur = end
    on_same = kind == "abs"
    while True:
        rev.append(PortId(same_side if on_same else opp_side, cur))
        nxt = parent_same[cur] if on_same else parent_opp[cur]
        if on_same and nxt == -1:
            break
        cur = nxt
        on_same = not on_same
    path_kind = PathKind.AUGMENTING if kind == "aug" else PathKind.ABSORBING
    return AlternatingPath(tuple(reversed(rev)), path_kind)
