"""Randomized cross-validation battery: policies vs the brute-force oracle.

Each check takes one random VOQ instance and returns the violations it
found (normally none). The battery powers ``portmatch verify`` and the
property-based acceptance tests; all checks resolve the policy functions
through the module object so a deliberately broken implementation can be
injected in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import oracle, policies
from .graph import (Matching, NodeWeightedBipartiteGraph, find_augment_or_absorb,
                    graph_from_voq, matching_weight, threshold)


@dataclass
class Violation:
    check: str
    detail: str
    voq: list[list[int]]
    matching: Optional[tuple] = None

    def __str__(self) -> str:
        lines = [f"check {self.check} failed: {self.detail}",
                 f"  voq = {self.voq}"]
        if self.matching is not None:
            lines.append(f"  matching = {list(self.matching)}")
        return "\n".join(lines)


def random_voq(rng: np.random.Generator, max_ports: int = 12,
               max_entry: int = 5) -> list[list[int]]:
    """A small random VOQ matrix within the oracle's port cap."""
    n1 = int(rng.integers(1, min(6, max_ports - 1) + 1))
    n2 = int(rng.integers(1, min(6, max_ports - n1) + 1))
    density = rng.uniform(0.15, 0.9)
    mat = [[0] * n2 for _ in range(n1)]
    for i in range(n1):
        for j in range(n2):
            if rng.random() < density:
                mat[i][j] = int(rng.integers(1, max_entry + 1))
    return mat


def _sample_matchings(g: NodeWeightedBipartiteGraph,
                      rng: np.random.Generator, count: int) -> list[Matching]:
    """Assorted valid matchings: empty, policy outputs, random partial fills."""
    out = [Matching(), policies.gmm(g, {e: 1 for e in g.edges}), policies.msm(g)]
    edges = list(g.edges)
    for _ in range(count):
        perm = rng.permutation(len(edges))
        used_in: set[int] = set()
        used_out: set[int] = set()
        pairs = []
        for k in perm:
            i, j = edges[k]
            if i in used_in or j in used_out or rng.random() < 0.35:
                continue
            pairs.append((i, j))
            used_in.add(i)
            used_out.add(j)
        out.append(Matching(pairs))
    return out


def check_mvm_optimal(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    m = policies.mvm(g)
    if not oracle.is_mvm(g, m):
        return [Violation("mvm-optimal",
                          f"weight {matching_weight(g, m)} < brute-force max "
                          f"{oracle.best_matching_weight(g)}", voq, m.pairs)]
    return []


def check_mvm_routes(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    w1 = matching_weight(g, policies.mvm(g))
    w2 = matching_weight(g, policies.mvm_via_transform(g))
    if w1 != w2:
        return [Violation("mvm-routes",
                          f"path-based route got {w1}, transform route {w2}", voq)]
    return []


def check_mvm_is_lhpf(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    m = policies.mvm(g)
    if not oracle.is_lhpf(g, m):
        return [Violation("mvm-is-lhpf",
                          f"mvm threshold {threshold(g, m)} != optimal "
                          f"{oracle.optimal_threshold(g)}", voq, m.pairs)]
    return []


def check_mvm_max_size(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    size_mvm = len(policies.mvm(g))
    size_msm = len(policies.msm(g))
    if size_mvm != size_msm:
        return [Violation("mvm-max-size",
                          f"mvm size {size_mvm} != max size {size_msm}", voq)]
    return []


def check_lhpf_optimal(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    out = []
    for label, m0 in (("empty", None),
                      ("gmm", policies.gmm(g, {e: 1 for e in g.edges}))):
        m = policies.lhpf_complete(g, m0)
        if not oracle.is_lhpf(g, m):
            out.append(Violation("lhpf-optimal",
                                 f"from {label} start: threshold {threshold(g, m)} "
                                 f"!= optimal {oracle.optimal_threshold(g)}",
                                 voq, m.pairs))
    return out


def check_lhpf_is_critical(voq, rng) -> list[Violation]:
    """Every enumerated matching attaining the optimal threshold matches
    every maximum-weight port."""
    g = graph_from_voq(voq)
    best = oracle.optimal_threshold(g)
    for m in oracle.enumerate_matchings(g):
        if threshold(g, m) == best and not oracle.is_critical_port(g, m):
            return [Violation("lhpf-is-critical",
                              "optimal-threshold matching misses a critical port",
                              voq, m.pairs)]
    return []


def check_critical_exists(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    m = policies.critical_port_matching(g)
    if not oracle.is_critical_port(g, m):
        return [Violation("critical-exists",
                          "constructed matching misses a critical port",
                          voq, m.pairs)]
    return []


def check_perfect_lhpf(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    all_ports = g.n_inputs + g.n_outputs
    if g.n_inputs != g.n_outputs or 2 * len(policies.msm(g)) != all_ports:
        return []
    m = policies.lhpf_complete(g)
    if 2 * len(m) != all_ports:
        return [Violation("perfect-lhpf",
                          "graph admits a perfect matching but lhpf output is not perfect",
                          voq, m.pairs)]
    return []


def check_maximal(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    out = []
    candidates = [("gmm", policies.gmm(g, policies.voq_edge_weights(voq))),
                  ("random", policies.random_maximal(g, rng))]
    for label, m in candidates:
        for (i, j) in g.edges:
            if m.output_for(i) is None and m.input_for(j) is None:
                out.append(Violation("maximal",
                                     f"{label} leaves addable edge ({i},{j})",
                                     voq, m.pairs))
                break
    return out


def check_mvm_fixpoint(voq, rng) -> list[Violation]:
    """No augmenting/absorbing path from any unmatched port iff the
    matching carries maximum vertex weight (sampled matchings)."""
    g = graph_from_voq(voq)
    best = oracle.best_matching_weight(g)
    out = []
    for m in _sample_matchings(g, rng, 4) + [policies.mvm(g)]:
        at_fixpoint = not any(
            oracle.has_augment_or_absorb(g, m, p)
            for p in g.ports() if not m.matches(p))
        weight_optimal = matching_weight(g, m) == best
        if at_fixpoint != weight_optimal:
            out.append(Violation(
                "mvm-fixpoint",
                f"fixpoint={at_fixpoint} but weight-optimal={weight_optimal}",
                voq, m.pairs))
    return out


def check_lhpf_sufficient(voq, rng) -> list[Violation]:
    """A heaviest unmatched port with no path certifies an optimal threshold."""
    g = graph_from_voq(voq)
    out = []
    for m in _sample_matchings(g, rng, 4):
        unmatched = [p for p in g.ports() if not m.matches(p)]
        if not unmatched:
            continue
        top = max(g.weight(p) for p in unmatched)
        heaviest = [p for p in unmatched if g.weight(p) == top]
        if any(not oracle.has_augment_or_absorb(g, m, p) for p in heaviest):
            if not oracle.is_lhpf(g, m):
                out.append(Violation(
                    "lhpf-sufficient",
                    "pathless heaviest unmatched port but threshold not optimal",
                    voq, m.pairs))
    return out


def check_search_complete(voq, rng) -> list[Violation]:
    """The BFS path search finds a path exactly when exhaustive search does."""
    g = graph_from_voq(voq)
    out = []
    for m in _sample_matchings(g, rng, 3):
        for p in g.ports():
            if m.matches(p):
                continue
            fast = find_augment_or_absorb(g, m, p) is not None
            slow = oracle.has_augment_or_absorb(g, m, p)
            if fast != slow:
                out.append(Violation(
                    "search-complete",
                    f"BFS found={fast}, exhaustive found={slow} from {p}",
                    voq, m.pairs))
    return out


def check_threshold_brute(voq, rng) -> list[Violation]:
    g = graph_from_voq(voq)
    computed = oracle.optimal_threshold(g)
    brute = min(threshold(g, m) for m in oracle.enumerate_matchings(g))
    if computed != brute:
        return [Violation("threshold-brute",
                          f"coverability route {computed} != enumeration {brute}",
                          voq)]
    return []


CHECKS: dict[str, Callable] = {
    "mvm-optimal": check_mvm_optimal,
    "mvm-routes": check_mvm_routes,
    "mvm-is-lhpf": check_mvm_is_lhpf,
    "mvm-max-size": check_mvm_max_size,
    "lhpf-optimal": check_lhpf_optimal,
    "lhpf-is-critical": check_lhpf_is_critical,
    "critical-exists": check_critical_exists,
    "perfect-lhpf": check_perfect_lhpf,
    "maximal": check_maximal,
    "mvm-fixpoint": check_mvm_fixpoint,
    "lhpf-sufficient": check_lhpf_sufficient,
    "search-complete": check_search_complete,
    "threshold-brute": check_threshold_brute,
}

# the expensive exhaustive checks run on a thinned schedule
_EXPENSIVE = {"mvm-fixpoint", "lhpf-sufficient", "search-complete"}
_EXPENSIVE_EVERY = 5


def run_battery(count: int = 500, max_ports: int = 12, seed: int = 0,
                checks: Optional[list[str]] = None,
                stop_on_first: bool = False) -> list[Violation]:
    """Run the selected checks over ``count`` random instances."""
    if checks is None:
        names = list(CHECKS)
    else:
        unknown = [c for c in checks if c not in CHECKS]
        if unknown:
            raise ValueError(f"unknown checks: {unknown}; "
                             f"available: {sorted(CHECKS)}")
        names = list(checks)
    rng = np.random.default_rng(seed)
    violations: list[Violation] = []
    for k in range(count):
        voq = random_voq(rng, max_ports=max_ports)
        for name in names:
            if (name in _EXPENSIVE and checks is None
                    and k % _EXPENSIVE_EVERY != 0):
                continue
            found = CHECKS[name](voq, rng)
            violations.extend(found)
            if violations and stop_on_first:
                return violations
    return violations
