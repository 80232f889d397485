"""Scheduling policies as pure matching computations.

Port-based policies (critical-port completion, lazy heaviest-port-first,
maximum vertex-weighted matching) run an alternating-path engine over
mutable mate arrays, flipping augmenting and absorbing paths found by the
breadth-first search in :mod:`portmatch.graph`. Edge-based baselines
(maximum edge-weight family, maximum size, greedy and randomized maximal)
are provided for comparison experiments. All functions are deterministic
given their inputs; the one randomized policy takes an explicit generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from . import assignment
from .graph import (Matching, NodeWeightedBipartiteGraph, _alternating_bfs,
                    _matching_from_sorted_pairs, graph_from_voq,
                    validate_matching)


class ScheduleContractError(RuntimeError):
    """A structural guarantee of the matching procedures failed to hold."""


# ---------------------------------------------------------------------------
# alternating-path engine shared by the port-based policies

def _port_order(g: NodeWeightedBipartiteGraph) -> list[tuple[int, int, int]]:
    """(-weight, side, index) triples: heaviest first, inputs break ties."""
    iw, ow = g.input_weights, g.output_weights
    order = [(-iw[i], 0, i) for i in range(g.n_inputs)]
    order += [(-ow[j], 1, j) for j in range(g.n_outputs)]
    order.sort()
    return order


def _init_mates(g: NodeWeightedBipartiteGraph,
                m0: Optional[Matching]) -> tuple[list[int], list[int]]:
    mate_in = [-1] * g.n_inputs
    mate_out = [-1] * g.n_outputs
    if m0 is not None:
        validate_matching(g, m0)
        for (i, j) in m0.pairs:
            mate_in[i] = j
            mate_out[j] = i
    return mate_in, mate_out


def _connect(g: NodeWeightedBipartiteGraph, mate_in: list[int],
             mate_out: list[int], side: int, idx: int) -> bool:
    """Search from an unmatched port and flip the found path in place."""
    if side == 0:
        adj, weights = g.adj_in, g.input_weights
        mate_same, mate_opp = mate_in, mate_out
    else:
        adj, weights = g.adj_out, g.output_weights
        mate_same, mate_opp = mate_out, mate_in
    kind, end, parent_opp, parent_same = _alternating_bfs(
        adj, weights, mate_same, mate_opp, idx)
    if kind is None:
        return False
    if kind == "aug":
        t = end
        while t != -1:
            u = parent_opp[t]
            prev = parent_same[u]
            mate_opp[t] = u
            mate_same[u] = t
            t = prev
    else:
        t = parent_same[end]
        mate_same[end] = -1
        while True:
            u = parent_opp[t]
            mate_opp[t] = u
            prev = parent_same[u]
            mate_same[u] = t
            if prev == -1:
                break
            t = prev
    return True


def _mates_to_matching(mate_in: list[int]) -> Matching:
    return _matching_from_sorted_pairs(
        [(i, j) for i, j in enumerate(mate_in) if j >= 0])


def critical_port_matching(g: NodeWeightedBipartiteGraph,
                           m0: Optional[Matching] = None) -> Matching:
    """Extend a matching until every maximum-weight port is matched.

    Each unmatched critical port is connected through an augmenting or
    absorbing path; an absorbing flip only evicts strictly lighter ports,
    so earlier critical ports stay matched and one sweep suffices. A
    missing path is a broken guarantee and raises ScheduleContractError
    rather than returning a partial result.
    """
    mate_in, mate_out = _init_mates(g, m0)
    top = g.max_weight()
    if top > 0:
        for negw, side, idx in _port_order(g):
            if -negw < top:
                break
            if (mate_in if side == 0 else mate_out)[idx] >= 0:
                continue
            if not _connect(g, mate_in, mate_out, side, idx):
                port = f"{'input' if side == 0 else 'output'} {idx}"
                raise ScheduleContractError(
                    f"no augmenting or absorbing path from critical {port}")
    return _mates_to_matching(mate_in)


def lhpf_complete(g: NodeWeightedBipartiteGraph,
                  m0: Optional[Matching] = None) -> Matching:
    """Drive a matching to the lowest achievable threshold.

    Connects the heaviest unmatched port through an augmenting or
    absorbing path, repeatedly, and stops the first time the heaviest
    unmatched port admits neither; that failure certifies the threshold is
    optimal. Flips never unmatch a port at or above the current target's
    weight, so a single sweep in descending weight order implements the
    repeated selection. The result need not be maximal.
    """
    mate_in, mate_out = _init_mates(g, m0)
    for _, side, idx in _port_order(g):
        if (mate_in if side == 0 else mate_out)[idx] >= 0:
            continue
        if not _connect(g, mate_in, mate_out, side, idx):
            break
    return _mates_to_matching(mate_in)


def mvm(g: NodeWeightedBipartiteGraph,
        m0: Optional[Matching] = None) -> Matching:
    """Maximum vertex-weighted matching.

    Sweeps ports in descending weight order, flipping augmenting and
    absorbing paths until no unmatched port admits either; that fixpoint
    is exactly the maximum-total-port-weight condition. ``m0`` is an
    optional warm start (any valid matching); it never changes the final
    weight, only which optimum is reached.
    """
    mate_in, mate_out = _init_mates(g, m0)
    order = _port_order(g)
    while True:
        progressed = False
        for _, side, idx in order:
            if (mate_in if side == 0 else mate_out)[idx] >= 0:
                continue
            if _connect(g, mate_in, mate_out, side, idx):
                progressed = True
        if not progressed:
            return _mates_to_matching(mate_in)


def mvm_via_transform(g: NodeWeightedBipartiteGraph) -> Matching:
    """Maximum vertex-weighted matching via an edge-weight reduction.

    Each edge gets weight equal to the sum of its endpoint weights, and a
    maximum edge-weight matching on those weights carries maximum total
    vertex weight. Serves as an independent route cross-validating
    :func:`mvm`.
    """
    iw, ow = g.input_weights, g.output_weights
    edge_weights = {(i, j): iw[i] + ow[j] for (i, j) in g.edges}
    return mwm(g, edge_weights)


# ---------------------------------------------------------------------------
# edge-weighted baselines

def voq_edge_weights(voq) -> dict[tuple[int, int], int]:
    """Per-edge queue occupancies, the default weights for mwm and gmm."""
    counts = getattr(voq, "counts", voq)
    weights = {}
    for i, row in enumerate(counts):
        for j, q in enumerate(row):
            if q > 0:
                weights[(i, j)] = int(q)
    return weights


def mwm(g: NodeWeightedBipartiteGraph,
        edge_weights: Mapping[tuple[int, int], int]) -> Matching:
    """Maximum edge-weight matching over the graph's edges."""
    for pair in edge_weights:
        if pair not in g._edge_set:
            raise ValueError(f"weight given for non-edge {pair}")
    restricted = {e: int(edge_weights.get(e, 0)) for e in g.edges}
    pairs = assignment.max_weight_matching(g.n_inputs, g.n_outputs, restricted)
    return Matching(pairs)


def mwm_alpha(g: NodeWeightedBipartiteGraph, voq, alpha: float) -> Matching:
    """Maximum edge-weight matching on queue occupancies raised to alpha.

    Computed in real arithmetic; weights within a relative 1e-9 of each
    other count as tied and fall to the canonical tie-break.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    counts = np.asarray(getattr(voq, "counts", voq), dtype=float)
    mask = counts > 0
    weights = np.power(counts, alpha, where=mask, out=np.zeros_like(counts))
    pairs = assignment.max_weight_matching_real(weights, mask)
    return Matching(pairs)


def mwm_zero_plus(g: NodeWeightedBipartiteGraph, voq) -> Matching:
    """Largest matching, log-weight-heaviest among those of maximal size.

    A single solve with edge weight B + log(q_ij), B above any achievable
    spread of log totals, makes one extra edge always beat any
    redistribution, so cardinality is maximized first.
    """
    counts = np.asarray(getattr(voq, "counts", voq), dtype=float)
    mask = counts > 0
    if not mask.any():
        return Matching()
    big = max(g.n_inputs, g.n_outputs) * math.log(1 + counts.max()) + 1.0
    logs = np.log(counts, where=mask, out=np.zeros_like(counts))
    weights = np.where(mask, big + logs, 0.0)
    pairs = assignment.max_weight_matching_real(weights, mask)
    return Matching(pairs)


def msm(g: NodeWeightedBipartiteGraph) -> Matching:
    """Maximum-cardinality matching (Hopcroft-Karp, canonical adjacency)."""
    pairs = assignment.hopcroft_karp(g.n_inputs, g.n_outputs, g.adj_in)
    return Matching(pairs)


def gmm(g: NodeWeightedBipartiteGraph,
        edge_weights: Mapping[tuple[int, int], int]) -> Matching:
    """Greedy weighted maximal matching: heaviest edges first, ties canonical."""
    order = sorted(g.edges, key=lambda e: (-edge_weights.get(e, 0), e))
    return _greedy_fill(order)


def random_maximal(g: NodeWeightedBipartiteGraph,
                   rng: np.random.Generator) -> Matching:
    """Maximal matching built along a uniformly shuffled edge order."""
    edges = list(g.edges)
    perm = rng.permutation(len(edges))
    return _greedy_fill([edges[k] for k in perm])


def _greedy_fill(ordered_edges) -> Matching:
    used_in: set[int] = set()
    used_out: set[int] = set()
    pairs = []
    for (i, j) in ordered_edges:
        if i not in used_in and j not in used_out:
            pairs.append((i, j))
            used_in.add(i)
            used_out.add(j)
    return Matching(pairs)


# ---------------------------------------------------------------------------
# policy specs and the per-slot driver

POLICY_KINDS = ("critical", "lhpf", "mvm", "mvm-transform", "mwm",
                "mwm-alpha", "mwm-zero-plus", "msm", "gmm", "random")

_WARM_START_KINDS = frozenset({"critical", "lhpf", "mvm"})

_ALIASES = {
    "critical-port": "critical",
    "mwm0+": "mwm-zero-plus",
    "mwm-0+": "mwm-zero-plus",
    "random-maximal": "random",
}


@dataclass(frozen=True)
class PolicySpec:
    """Identifies a scheduling policy, with its parameter where one exists."""

    kind: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy {self.kind!r}")
        if self.kind == "mwm-alpha":
            if self.alpha is None or not self.alpha > 0:
                raise ValueError("mwm-alpha requires alpha > 0")
        elif self.alpha is not None:
            raise ValueError(f"policy {self.kind!r} takes no alpha")

    @staticmethod
    def parse(text: str) -> "PolicySpec":
        """Parse names like ``mvm``, ``mwm-alpha:0.5`` or ``mwm0+``."""
        name, _, arg = text.strip().lower().partition(":")
        name = _ALIASES.get(name, name)
        if name == "mwm-alpha":
            if not arg:
                raise ValueError("mwm-alpha needs a value, e.g. mwm-alpha:0.5")
            return PolicySpec("mwm-alpha", alpha=float(arg))
        if arg:
            raise ValueError(f"policy {name!r} takes no argument")
        return PolicySpec(name)

    @property
    def label(self) -> str:
        if self.kind == "mwm-alpha":
            return f"mwm-alpha:{self.alpha:g}"
        return self.kind


class Scheduler:
    """Per-slot matching driver for one policy instance.

    Owns the policy's RNG (randomized policies only) and a warm-start
    matching for the path-based policies: the previous slot's matching,
    pruned to edges that still exist, seeds the next computation. Warm
    starting never changes what the policy guarantees per slot, only which
    of the admissible matchings it lands on.
    """

    def __init__(self, spec, seed=0):
        if isinstance(spec, str):
            spec = PolicySpec.parse(spec)
        self.spec = spec
        self._rng = np.random.default_rng(seed)
        self._warm: Optional[Matching] = None

    def matching(self, voq) -> Matching:
        g = graph_from_voq(voq)
        kind = self.spec.kind
        if kind in _WARM_START_KINDS:
            m0 = self._pruned_warm(g)
            if kind == "critical":
                m = critical_port_matching(g, m0)
            elif kind == "lhpf":
                m = lhpf_complete(g, m0)
            else:
                m = mvm(g, m0)
            self._warm = m
            return m
        if kind == "mwm":
            counts = getattr(voq, "counts", voq)
            return Matching(assignment.max_weight_matching_dense(counts))
        if kind == "mvm-transform":
            return mvm_via_transform(g)
        if kind == "mwm-alpha":
            return mwm_alpha(g, voq, self.spec.alpha)
        if kind == "mwm-zero-plus":
            return mwm_zero_plus(g, voq)
        if kind == "msm":
            return msm(g)
        if kind == "gmm":
            return gmm(g, voq_edge_weights(voq))
        if kind == "random":
            return random_maximal(g, self._rng)
        raise AssertionError(f"unhandled policy {kind}")

    def _pruned_warm(self, g: NodeWeightedBipartiteGraph) -> Optional[Matching]:
        if self._warm is None:
            return None
        edge_set = g._edge_set
        kept = [e for e in self._warm.pairs if e in edge_set]
        if len(kept) == len(self._warm.pairs):
            return self._warm
        return _matching_from_sorted_pairs(kept)
