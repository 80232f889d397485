"""Independent brute-force verifiers for matchings and thresholds.

Everything here is deliberately decoupled from the policy implementations:
matching enumeration is plain backtracking, coverability uses its own
augmenting DFS, and path existence is checked by exhaustive enumeration of
simple alternating paths. These are the ground truth the property tests
and the verification battery compare against.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Optional

from .graph import (Matching, NodeWeightedBipartiteGraph, PortId, Side,
                    input_port, matching_weight, output_port, threshold)

# enumeration stays under ~1e5 matchings with at most this many total ports
DEFAULT_PORT_CAP = 12


def enumerate_matchings(g: NodeWeightedBipartiteGraph,
                        cap: int = DEFAULT_PORT_CAP) -> Iterator[Matching]:
    """Yield every matching of ``g`` exactly once, the empty one included.

    Rejects graphs with more than ``cap`` total ports; enumeration is
    exponential and meant for oracle-scale instances only.
    """
    if g.n_inputs + g.n_outputs > cap:
        raise ValueError(
            f"graph has {g.n_inputs + g.n_outputs} ports, enumeration cap is {cap}")

    adj = g.adj_in
    n = g.n_inputs
    chosen: list[tuple[int, int]] = []
    used_out: set[int] = set()

    def rec(i: int) -> Iterator[Matching]:
        if i == n:
            yield Matching(chosen)
            return
        yield from rec(i + 1)
        for j in adj[i]:
            if j not in used_out:
                chosen.append((i, j))
                used_out.add(j)
                yield from rec(i + 1)
                used_out.remove(j)
                chosen.pop()

    yield from rec(0)


def best_matching_weight(g: NodeWeightedBipartiteGraph,
                         cap: int = DEFAULT_PORT_CAP) -> int:
    """Maximum total matched-port weight, by exhaustive enumeration."""
    return max(matching_weight(g, m) for m in enumerate_matchings(g, cap))


def _neighborhood(g: NodeWeightedBipartiteGraph, ports: Iterable[PortId]) -> set[PortId]:
    out: set[PortId] = set()
    for p in ports:
        if p.side is Side.INPUT:
            out.update(output_port(j) for j in g.adj_in[p.index])
        else:
            out.update(input_port(i) for i in g.adj_out[p.index])
    return out


def _require_same_side(ports: list[PortId]) -> None:
    if ports and any(p.side is not ports[0].side for p in ports):
        raise ValueError("ports must all lie on the same side")


def can_cover(g: NodeWeightedBipartiteGraph, ports: Iterable[PortId]) -> bool:
    """True iff some matching matches every port in the same-side set.

    Augmenting-DFS saturation check, independent of the BFS machinery the
    policies rely on.
    """
    ports = sorted(set(ports), key=PortId.sort_key)
    _require_same_side(ports)
    if not ports:
        return True
    side = ports[0].side
    adj = g.adj_in if side is Side.INPUT else g.adj_out
    mate: dict[int, int] = {}

    def try_assign(u: int, seen: set[int]) -> bool:
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in mate or try_assign(mate[v], seen):
                mate[v] = u
                return True
        return False

    for p in ports:
        if not try_assign(p.index, set()):
            return False
    return True


@dataclass(frozen=True)
class HallWitness:
    """A same-side subset with strictly fewer neighbors than members."""

    subset: frozenset[PortId]
    neighborhood: frozenset[PortId]


def hall_witness(g: NodeWeightedBipartiteGraph,
                 ports: Iterable[PortId]) -> Optional[HallWitness]:
    """A deficient subset of ``ports``, or None when the set is coverable."""
    ports = sorted(set(ports), key=PortId.sort_key)
    _require_same_side(ports)
    if can_cover(g, ports):
        return None
    for size in range(1, len(ports) + 1):
        for subset in combinations(ports, size):
            nbhd = _neighborhood(g, subset)
            if len(nbhd) < len(subset):
                return HallWitness(frozenset(subset), frozenset(nbhd))
    raise AssertionError("uncoverable set without a deficient subset")


def optimal_threshold(g: NodeWeightedBipartiteGraph) -> int:
    """Lowest threshold any matching of ``g`` can achieve.

    For each distinct positive weight w (ascending), both sides' sets of
    ports weighing at least w are tested for coverability; a coverable pair
    of sets can be merged into one matching, whose threshold is then one
    more than the next distinct weight below w. Falls back to max weight + 1
    when not even the heaviest ports are coverable.
    """
    weights = sorted({w for w in g.input_weights + g.output_weights if w > 0})
    if not weights:
        return 1
    prev = 0
    for w in weights:
        s_in = [input_port(i) for i, wi in enumerate(g.input_weights) if wi >= w]
        s_out = [output_port(j) for j, wj in enumerate(g.output_weights) if wj >= w]
        if can_cover(g, s_in) and can_cover(g, s_out):
            return prev + 1
        prev = w
    return weights[-1] + 1


def is_lhpf(g: NodeWeightedBipartiteGraph, m: Matching) -> bool:
    """Whether ``m`` attains the graph's optimal threshold."""
    return threshold(g, m) == optimal_threshold(g)


def is_critical_port(g: NodeWeightedBipartiteGraph, m: Matching) -> bool:
    """Whether ``m`` matches every maximum-weight port (vacuous at max 0)."""
    top = g.max_weight()
    if top == 0:
        return True
    return all(m.matches(p) for p in g.ports() if g.weight(p) == top)


def is_mvm(g: NodeWeightedBipartiteGraph, m: Matching,
           cap: int = DEFAULT_PORT_CAP) -> bool:
    """Whether ``m`` carries the maximum possible matched-port weight."""
    return matching_weight(g, m) == best_matching_weight(g, cap)


def has_augment_or_absorb(g: NodeWeightedBipartiteGraph, m: Matching,
                          start: PortId) -> bool:
    """Exhaustively test for an augmenting or absorbing path from ``start``.

    Enumerates every simple alternating path by depth-first search with
    per-path visited sets; exponential, oracle scale only.
    """
    if m.matches(start):
        raise ValueError(f"port {start} is already matched")
    if start.side is Side.INPUT:
        adj_same, weights_same = g.adj_in, g.input_weights
        mate_of_same, mate_of_opp = m.output_for, m.input_for
    else:
        adj_same, weights_same = g.adj_out, g.output_weights
        mate_of_same, mate_of_opp = m.input_for, m.output_for
    w_root = weights_same[start.index]

    def explore(u: int, seen_same: set[int], seen_opp: set[int]) -> bool:
        matched_to = mate_of_same(u)
        for t in adj_same[u]:
            if t == matched_to or t in seen_opp:
                continue
            s2 = mate_of_opp(t)
            if s2 is None:
                return True  # augmenting
            if s2 in seen_same:
                continue
            if weights_same[s2] < w_root:
                return True  # absorbing
            if explore(s2, seen_same | {s2}, seen_opp | {t}):
                return True
        return False

    return explore(start.index, {start.index}, set())
