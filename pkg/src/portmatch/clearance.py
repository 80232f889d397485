"""Draining a loaded switch with no further arrivals.

The heaviest port weight is an obvious floor on how many slots any
schedule needs. Critical-port policies achieve that floor slot by slot;
this module runs any policy against an initial loading and reports how it
did, and also produces the batch alternative: a decomposition of the
loading into matchings with multiplicities that total at most the floor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .graph import Matching, graph_from_voq
from .policies import PolicySpec, Scheduler, critical_port_matching
from .voq import VoqState


def tau_star(voq) -> int:
    """Clearance floor: the maximum port weight of the loading."""
    if isinstance(voq, VoqState):
        return voq.max_port_weight()
    return VoqState(voq).max_port_weight()


def clearance_example(n: int) -> VoqState:
    """The adversarial n x n loading separating port- from edge-weighted policies.

    Input 0 holds one packet for each of outputs 0..n-2; every other input i
    holds n-1 packets for output i-1. All ports weigh n-1 except outputs
    0..n-2, which weigh n, so the clearance floor is n, yet edge-greedy
    policies starve input 0 for n-2 slots and need at least 2n-3.
    """
    if n < 2:
        raise ValueError("example needs n >= 2")
    counts = [[0] * n for _ in range(n)]
    for j in range(n - 1):
        counts[0][j] = 1
    for i in range(1, n):
        counts[i][i - 1] = n - 1
    return VoqState(counts)


@dataclass
class ClearanceReport:
    """Outcome of draining one loading under one policy."""

    policy: str
    slots_used: int
    tau_star: int
    per_slot_max_port_weight: list[int] = field(default_factory=list)
    schedule: Optional[list[Matching]] = None

    @property
    def optimal(self) -> bool:
        return self.slots_used == self.tau_star


def run_clearance(voq: Union[VoqState, list], policy,
                  seed: int = 0, keep_schedule: bool = False) -> ClearanceReport:
    """Apply a policy's matching each slot until the loading is empty.

    ``per_slot_max_port_weight`` records the maximum port weight after each
    slot's departures. A policy that stops making progress trips a safety
    cap of 4*tau_star + max(N1, N2)^2 slots and raises RuntimeError.
    """
    state = voq.copy() if isinstance(voq, VoqState) else VoqState(voq)
    spec = policy if isinstance(policy, PolicySpec) else PolicySpec.parse(policy)
    scheduler = Scheduler(spec, seed=seed)
    floor = state.max_port_weight()
    cap = 4 * floor + max(state.n_inputs, state.n_outputs, 1) ** 2
    trajectory: list[int] = []
    schedule: Optional[list[Matching]] = [] if keep_schedule else None
    slots = 0
    while not state.is_empty():
        if slots >= cap:
            raise RuntimeError(
                f"policy {spec.label} exceeded the safety cap of {cap} slots "
                f"with {state.total()} packets left")
        m = scheduler.matching(state)
        for (i, j) in m.pairs:
            state.remove_head(i, j)
        slots += 1
        trajectory.append(state.max_port_weight())
        if schedule is not None:
            schedule.append(m)
    return ClearanceReport(policy=spec.label, slots_used=slots, tau_star=floor,
                           per_slot_max_port_weight=trajectory, schedule=schedule)


@dataclass
class BvnDecomposition:
    """Matchings with multiplicities that rebuild a loading exactly."""

    n_inputs: int
    n_outputs: int
    matchings: list[Matching]
    multiplicities: list[int]

    def total_multiplicity(self) -> int:
        return sum(self.multiplicities)

    def reconstruct(self) -> list[list[int]]:
        out = [[0] * self.n_outputs for _ in range(self.n_inputs)]
        for m, k in zip(self.matchings, self.multiplicities):
            for (i, j) in m.pairs:
                out[i][j] += k
        return out


def bvn_decompose(voq: Union[VoqState, list]) -> BvnDecomposition:
    """Decompose a loading into critical-port matchings with multiplicities.

    Each round extracts a critical-port matching of the remaining loading
    and subtracts it as many times as possible without any port exceeding
    the remaining clearance floor, so the multiplicities total at most the
    floor of the original loading.
    """
    state = voq.copy() if isinstance(voq, VoqState) else VoqState(voq)
    matchings: list[Matching] = []
    multiplicities: list[int] = []
    while not state.is_empty():
        g = graph_from_voq(state)
        m = critical_port_matching(g)
        remaining_floor = state.max_port_weight()
        heaviest_unmatched = 0
        for p in g.ports():
            if not m.matches(p):
                heaviest_unmatched = max(heaviest_unmatched, g.weight(p))
        count = remaining_floor - heaviest_unmatched
        count = min(count, min(state.counts[i][j] for (i, j) in m.pairs))
        assert count >= 1
        for (i, j) in m.pairs:
            state.counts[i][j] -= count
            state.row_sums[i] -= count
            state.col_sums[j] -= count
        matchings.append(m)
        multiplicities.append(count)
    return BvnDecomposition(state.n_inputs, state.n_outputs,
                            matchings, multiplicities)
