"""Slot-by-slot switch simulation with arrivals and delay accounting.

Within a slot, departures happen before arrivals, so a packet can never
leave in the slot it arrived and every measured delay is at least one
slot. Delay estimates use batch means over the post-warmup window; a run
stops once the 99% confidence halfwidth falls inside the configured
fraction of the mean, or at the slot cap, whichever comes first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .policies import PolicySpec, Scheduler
from .traffic import (ArrivalGenerator, BernoulliTraffic, BurstyTraffic,
                      epsilon_star, warn_if_inadmissible)
from .voq import VoqState

# two-sided 99% normal quantile
Z99 = 2.5758293035489004


def step(state: VoqState, matching, arrivals: Sequence[tuple[int, int]],
         slot: int) -> list[tuple[int, int, Optional[int]]]:
    """Advance one slot: serve the matching, then append the arrivals.

    Returns one (input, output, delay) record per departure; delay is None
    when the state does not track timestamps. Scheduling a departure on an
    empty queue raises ValueError.
    """
    departures = []
    for (i, j) in matching.pairs:
        delay = state.remove_head(i, j, slot)
        departures.append((i, j, delay))
    for (i, j) in arrivals:
        state.add_arrival(i, j, slot)
    return departures


@dataclass(frozen=True)
class StopRule:
    """Batch-means confidence-interval stopping for the mean delay."""

    ci_relative_halfwidth: float = 0.01
    batches: int = 30
    check_every: int = 10_000
    min_slots: int = 20_000


@dataclass(frozen=True)
class SimConfig:
    n_inputs: int
    n_outputs: int
    policy: PolicySpec
    traffic: Union[BernoulliTraffic, BurstyTraffic]
    seed: Union[int, tuple] = 0
    policy_seed: Union[int, tuple] = 0
    max_slots: int = 500_000
    stop_rule: Optional[StopRule] = StopRule()
    warmup_fraction: float = 0.1
    track_delays: bool = True
    strict_admissibility: bool = False
    invariant_check_every: int = 10_000
    trajectory_points: int = 512


@dataclass
class SimReport:
    """Everything one simulation cell reports back."""

    policy: str
    n_inputs: int
    n_outputs: int
    traffic: str
    seed: Union[int, tuple]
    slots_run: int
    arrived_total: int
    departed_total: int
    arrived_per_input: list[int]
    arrived_per_output: list[int]
    departed_per_input: list[int]
    departed_per_output: list[int]
    mean_delay: Optional[float]
    ci99_halfwidth: Optional[float]
    stop_reason: str
    epsilon_star: float
    final_max_port_queue: int
    max_port_queue_trajectory: list[tuple[int, int]] = field(default_factory=list)
    quarter_mean_max_queue: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    conservation_checks: int = 0


def _batch_stats(delay_sum: np.ndarray, delay_cnt: np.ndarray, slots: int,
                 warmup_fraction: float, batches: int
                 ) -> tuple[Optional[float], Optional[float]]:
    """Post-warmup mean delay and 99% CI halfwidth from batch means."""
    warm = int(slots * warmup_fraction)
    span = slots - warm
    if span < batches:
        return None, None
    total_cnt = delay_cnt[warm:slots].sum()
    if total_cnt == 0:
        return None, None
    mean = float(delay_sum[warm:slots].sum() / total_cnt)
    bounds = warm + (np.arange(batches) * span) // batches
    sums = np.add.reduceat(delay_sum[:slots], bounds)
    cnts = np.add.reduceat(delay_cnt[:slots], bounds)
    if (cnts == 0).any():
        return mean, None
    means = sums / cnts
    spread = float(means.std(ddof=1))
    halfwidth = Z99 * spread / np.sqrt(batches)
    return mean, float(halfwidth)


def simulate(config: SimConfig) -> SimReport:
    """Run one simulation cell to its stopping point.

    Deterministic: the report is a pure function of the config, including
    its seeds. Packet conservation is asserted at a fixed cadence and a
    violation raises RuntimeError.
    """
    n1, n2 = config.n_inputs, config.n_outputs
    model = config.traffic
    if model.n_inputs != n1 or getattr(model, "n_outputs", n2) != n2:
        raise ValueError("traffic model shape does not match the switch")
    eps = epsilon_star(model)
    if config.strict_admissibility and eps <= 0:
        raise ValueError(f"inadmissible traffic (slack {eps:.4f}) in strict mode")
    warn_if_inadmissible(model)

    spec = config.policy if isinstance(config.policy, PolicySpec) \
        else PolicySpec.parse(config.policy)
    scheduler = Scheduler(spec, seed=_entropy(config.policy_seed))
    arrivals = ArrivalGenerator(model, seed=np.random.SeedSequence(_entropy(config.seed)))
    state = VoqState.zeros(n1, n2, track_delays=config.track_delays)

    max_slots = config.max_slots
    delay_sum = np.zeros(max_slots)
    delay_cnt = np.zeros(max_slots, dtype=np.int64)
    max_weight = np.zeros(max_slots, dtype=np.int32)
    arrived_in = [0] * n1
    arrived_out = [0] * n2
    departed_in = [0] * n1
    departed_out = [0] * n2
    arrived_total = 0
    departed_total = 0
    conservation_checks = 0
    stop_reason = "max_slots"
    rule = config.stop_rule

    slots_run = 0
    for slot in range(max_slots):
        m = scheduler.matching(state)
        for (i, j) in m.pairs:
            delay = state.remove_head(i, j, slot)
            departed_in[i] += 1
            departed_out[j] += 1
            if delay is not None:
                delay_sum[slot] += delay
                delay_cnt[slot] += 1
        departed_total += len(m.pairs)
        batch = arrivals.slot_arrivals(slot)
        for (i, j) in batch:
            state.add_arrival(i, j, slot)
            arrived_in[i] += 1
            arrived_out[j] += 1
        arrived_total += len(batch)
        max_weight[slot] = state.max_port_weight()
        slots_run = slot + 1
        if slots_run % config.invariant_check_every == 0:
            conservation_checks += 1
            if arrived_total != departed_total + state.total():
                raise RuntimeError(
                    f"packet conservation broken at slot {slot}: "
                    f"{arrived_total} arrived, {departed_total} departed, "
                    f"{state.total()} queued")
        if (rule is not None and slots_run >= rule.min_slots
                and slots_run % rule.check_every == 0):
            mean, halfwidth = _batch_stats(delay_sum, delay_cnt, slots_run,
                                           config.warmup_fraction, rule.batches)
            if (mean is not None and halfwidth is not None and mean > 0
                    and halfwidth <= rule.ci_relative_halfwidth * mean):
                stop_reason = "ci"
                break

    mean, halfwidth = _batch_stats(delay_sum, delay_cnt, slots_run,
                                   config.warmup_fraction,
                                   rule.batches if rule else StopRule().batches)
    if config.track_delays and departed_total == 0:
        mean, halfwidth = None, None

    quarter = max(1, slots_run // 4)
    quarters = tuple(float(max_weight[k * quarter:min((k + 1) * quarter, slots_run)].mean())
                     if min((k + 1) * quarter, slots_run) > k * quarter else 0.0
                     for k in range(4))
    stride = max(1, slots_run // config.trajectory_points)
    traj_idx = list(range(0, slots_run, stride))
    if slots_run and traj_idx[-1] != slots_run - 1:
        traj_idx.append(slots_run - 1)
    trajectory = [(s, int(max_weight[s])) for s in traj_idx]

    return SimReport(
        policy=spec.label, n_inputs=n1, n_outputs=n2, traffic=model.label(),
        seed=config.seed, slots_run=slots_run,
        arrived_total=arrived_total, departed_total=departed_total,
        arrived_per_input=arrived_in, arrived_per_output=arrived_out,
        departed_per_input=departed_in, departed_per_output=departed_out,
        mean_delay=mean, ci99_halfwidth=halfwidth, stop_reason=stop_reason,
        epsilon_star=eps, final_max_port_queue=int(state.max_port_weight()),
        max_port_queue_trajectory=trajectory,
        quarter_mean_max_queue=quarters,
        conservation_checks=conservation_checks)


def _entropy(seed) -> Union[int, list]:
    if isinstance(seed, tuple):
        return list(seed)
    return seed
