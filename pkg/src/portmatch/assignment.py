"""Exact solvers behind the edge-weighted policies.

Two workhorses live here: a maximum total-weight bipartite matching on
integer edge weights (an O(N^3) shortest-augmenting-path assignment solve
on the dense matrix, absent edges padded at zero), and Hopcroft-Karp for
maximum-cardinality matching.

Tie handling for the weighted solve is made explicit: every real edge gets
a small rank bonus that decreases along the canonical (input, output)
order, scaled so that total weight always dominates. Among equal-weight
optima the solver therefore prefers matchings containing canonically
earlier edges; any residual bonus ties fall to the solver's fixed
deterministic scan order.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

# rank-scaled int64 weights must stay inside the 53-bit window where the
# assignment solve is exact
_MAX_SAFE_SCALED = 1 << 52

# relative spread below which two real-valued edge weights count as tied
REAL_TIE_TOLERANCE = 1e-9


def _solve_scaled(scaled: np.ndarray) -> list[tuple[int, int]]:
    """Assign on the rank-scaled matrix; positive cells are real edges."""
    rows, cols = linear_sum_assignment(scaled, maximize=True)
    return [(int(i), int(j)) for i, j in zip(rows, cols) if scaled[i, j] > 0]


def _rank_scale(weights: np.ndarray, edge_mask: np.ndarray) -> np.ndarray:
    """Scale non-negative integer weights and add the canonical rank bonus."""
    n_edges = int(edge_mask.sum())
    if n_edges == 0:
        return np.zeros_like(weights)
    base = min(weights.shape) * n_edges + 1
    if int(weights.max(initial=0)) > _MAX_SAFE_SCALED // base:
        raise ValueError("edge weights too large for an exact dense solve")
    flat = edge_mask.ravel()
    rank = np.cumsum(flat) - 1
    bonus = np.where(flat, n_edges - rank, 0).reshape(weights.shape)
    return weights * base + bonus


def max_weight_matching(n_inputs: int, n_outputs: int,
                        edge_weights: Mapping[tuple[int, int], int]
                        ) -> list[tuple[int, int]]:
    """Matching maximizing the total of non-negative integer edge weights.

    Absent edges are never used; the matching may leave ports unmatched.
    Deterministic: among equal-weight optima the one containing canonically
    earlier edges wins (see the module docstring).
    """
    if not edge_weights:
        return []
    weights = np.zeros((n_inputs, n_outputs), dtype=np.int64)
    mask = np.zeros((n_inputs, n_outputs), dtype=bool)
    for (i, j), w in edge_weights.items():
        w = int(w)
        if w < 0:
            raise ValueError(f"edge ({i},{j}) has negative weight {w}")
        if not (0 <= i < n_inputs and 0 <= j < n_outputs):
            raise ValueError(f"edge ({i},{j}) out of range")
        weights[i, j] = w
        mask[i, j] = True
    return _solve_scaled(_rank_scale(weights, mask))


def max_weight_matching_dense(weights) -> list[tuple[int, int]]:
    """Dense fast path: positive integer cells are the edges and weights."""
    arr = np.asarray(weights, dtype=np.int64)
    return _solve_scaled(_rank_scale(arr, arr > 0))


def max_weight_matching_real(weights, edge_mask) -> list[tuple[int, int]]:
    """Dense solve on real weights, quantized to a relative tie grid.

    Weights within REAL_TIE_TOLERANCE of each other (relative to the
    largest) collapse onto one grid value, after which the canonical
    integer tie-break applies. Masked-off cells are not edges.
    """
    arr = np.asarray(weights, dtype=float)
    mask = np.asarray(edge_mask, dtype=bool)
    if not mask.any():
        return []
    top = float(arr[mask].max())
    if top <= 0:
        quantized = np.zeros(arr.shape, dtype=np.int64)
    else:
        unit = top * REAL_TIE_TOLERANCE
        quantized = np.where(mask, np.rint(arr / unit), 0).astype(np.int64)
        if (quantized[mask] < 0).any():
            raise ValueError("real edge weights must be non-negative")
    return _solve_scaled(_rank_scale(quantized, mask))


def hopcroft_karp(n_inputs: int, n_outputs: int,
                  adj: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Maximum-cardinality matching via layered shortest augmenting paths.

    ``adj[i]`` lists the outputs adjacent to input ``i``; lists are scanned
    in the order given, so canonical adjacency yields a canonical matching.
    """
    INF = n_inputs + n_outputs + 1
    mate_in = [-1] * n_inputs
    mate_out = [-1] * n_outputs
    dist = [0] * n_inputs

    def bfs() -> bool:
        queue = deque()
        for i in range(n_inputs):
            if mate_in[i] == -1:
                dist[i] = 0
                queue.append(i)
            else:
                dist[i] = INF
        found = False
        while queue:
            i = queue.popleft()
            for j in adj[i]:
                i2 = mate_out[j]
                if i2 == -1:
                    found = True
                elif dist[i2] == INF:
                    dist[i2] = dist[i] + 1
                    queue.append(i2)
        return found

    def dfs(i: int) -> bool:
        for j in adj[i]:
            i2 = mate_out[j]
            if i2 == -1 or (dist[i2] == dist[i] + 1 and dfs(i2)):
                mate_in[i] = j
                mate_out[j] = i
                return True
        dist[i] = INF
        return False

    while bfs():
        for i in range(n_inputs):
            if mate_in[i] == -1:
                dfs(i)
    return [(i, mate_in[i]) for i in range(n_inputs) if mate_in[i] != -1]
