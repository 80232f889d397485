"""Arrival processes for the switch simulator.

Two models: independent per-queue Bernoulli arrivals, and bursty sources
that alternate heavy-tailed active runs (truncated power-law lengths, one
packet per slot) with geometrically distributed idle gaps. Each input port
draws from its own RNG substream, so a source's sample path depends only
on the master seed and its own index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

BLOCK_SLOTS = 4096


def truncated_power_law_pmf(exponent: float, support_max: int) -> np.ndarray:
    k = np.arange(1, support_max + 1, dtype=float)
    w = k ** (-exponent)
    return w / w.sum()


def truncated_power_law_mean(exponent: float, support_max: int) -> float:
    pmf = truncated_power_law_pmf(exponent, support_max)
    return float((pmf * np.arange(1, support_max + 1)).sum())


def sample_burst_lengths(rng: np.random.Generator, n: int,
                         exponent: float, support_max: int) -> np.ndarray:
    """Draw burst lengths from the truncated power law by inverse transform."""
    cdf = np.cumsum(truncated_power_law_pmf(exponent, support_max))
    u = rng.random(n)
    return np.minimum(np.searchsorted(cdf, u, side="right") + 1, support_max)


@dataclass(frozen=True)
class BernoulliTraffic:
    """Independent arrivals: queue (i, j) receives a packet w.p. rates[i][j]."""

    rates: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        for row in self.rates:
            for r in row:
                if not 0.0 <= r <= 1.0:
                    raise ValueError(f"Bernoulli rate {r} outside [0, 1]")

    @classmethod
    def uniform(cls, n_inputs: int, n_outputs: int, port_load: float) -> "BernoulliTraffic":
        """Symmetric loading: every queue at port_load / n_outputs."""
        r = port_load / n_outputs
        return cls(tuple(tuple(r for _ in range(n_outputs))
                         for _ in range(n_inputs)))

    @property
    def n_inputs(self) -> int:
        return len(self.rates)

    @property
    def n_outputs(self) -> int:
        return len(self.rates[0]) if self.rates else 0

    def port_loads(self) -> tuple[list[float], list[float]]:
        mat = np.asarray(self.rates, dtype=float)
        return list(mat.sum(axis=1)), list(mat.sum(axis=0))

    def label(self) -> str:
        return "bernoulli"


@dataclass(frozen=True)
class BurstyTraffic:
    """On/off sources: power-law active runs, geometric idle gaps.

    During an active run the source emits one packet per slot; the
    destination is drawn at burst start (or per packet when
    ``per_burst_destination`` is off). Idle gaps live on {0, 1, ...} with
    the given mean, so any input load below 1 is reachable; the input load
    works out to mean_burst / (mean_burst + mean_idle).
    """

    n_inputs: int
    n_outputs: int
    mean_idle: float
    zipf_exponent: float = 1.25
    burst_support_max: int = 100
    dest_distribution: Optional[tuple[tuple[float, ...], ...]] = None
    per_burst_destination: bool = True

    def __post_init__(self):
        if self.mean_idle < 0:
            raise ValueError("mean_idle must be non-negative")
        if self.dest_distribution is not None:
            for row in self.dest_distribution:
                if len(row) != self.n_outputs or abs(sum(row) - 1.0) > 1e-9:
                    raise ValueError("destination rows must sum to 1")

    @classmethod
    def symmetric(cls, n_inputs: int, n_outputs: int, port_load: float,
                  zipf_exponent: float = 1.25, burst_support_max: int = 100,
                  per_burst_destination: bool = True) -> "BurstyTraffic":
        """Solve the idle mean so every input carries ``port_load``."""
        if not 0.0 < port_load < 1.0:
            raise ValueError("port_load must be in (0, 1) for calibration")
        mean_burst = truncated_power_law_mean(zipf_exponent, burst_support_max)
        mean_idle = mean_burst * (1.0 - port_load) / port_load
        return cls(n_inputs=n_inputs, n_outputs=n_outputs, mean_idle=mean_idle,
                   zipf_exponent=zipf_exponent,
                   burst_support_max=burst_support_max,
                   per_burst_destination=per_burst_destination)

    def mean_burst_length(self) -> float:
        return truncated_power_law_mean(self.zipf_exponent, self.burst_support_max)

    def _dest_rows(self) -> np.ndarray:
        if self.dest_distribution is None:
            return np.full((self.n_inputs, self.n_outputs), 1.0 / self.n_outputs)
        return np.asarray(self.dest_distribution, dtype=float)

    def port_loads(self) -> tuple[list[float], list[float]]:
        mean_burst = self.mean_burst_length()
        lam = mean_burst / (mean_burst + self.mean_idle)
        input_loads = [lam] * self.n_inputs
        dest = self._dest_rows()
        output_loads = list((lam * dest).sum(axis=0))
        return input_loads, output_loads

    def label(self) -> str:
        return f"bursty-zipf{self.zipf_exponent:g}"


TrafficModel = Union[BernoulliTraffic, BurstyTraffic]


def epsilon_star(model) -> float:
    """Admissibility slack: min over ports of (1 - analytic load)."""
    input_loads, output_loads = model.port_loads()
    return min(1.0 - lam for lam in list(input_loads) + list(output_loads))


def warn_if_inadmissible(model) -> float:
    eps = epsilon_star(model)
    if eps <= 0:
        warnings.warn(
            f"traffic model is not admissible (min port slack {eps:.4f}); "
            "queues may grow without bound", stacklevel=2)
    return eps


class ArrivalGenerator:
    """Sequential per-slot arrival sampler with one substream per input.

    Slots must be requested in order; arrivals are pre-sampled in blocks
    for speed but the visible behavior is a pure function of (model, seed).
    """

    def __init__(self, model, seed=0):
        self.model = model
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self._rngs = [np.random.default_rng(child)
                      for child in ss.spawn(model.n_inputs)]
        self._block: list[list[tuple[int, int]]] = []
        self._block_start = 0
        self._next_slot = 0
        if isinstance(model, BurstyTraffic):
            self._cdf = np.cumsum(truncated_power_law_pmf(
                model.zipf_exponent, model.burst_support_max))
            self._dest = model._dest_rows()
            # per input: remaining slots in the current run; active-run destination.
            # Sources start as if a burst just ended, so the first run is idle.
            self._active = [True] * model.n_inputs
            self._remaining = [0] * model.n_inputs
            self._burst_dest = [0] * model.n_inputs
            p = 1.0 / (1.0 + model.mean_idle)
            self._idle_p = min(max(p, 1e-12), 1.0)

    def slot_arrivals(self, slot: int) -> list[tuple[int, int]]:
        if slot != self._next_slot:
            raise ValueError("slots must be consumed sequentially")
        self._next_slot += 1
        offset = slot - self._block_start
        if offset >= len(self._block):
            self._block_start = slot
            self._fill_block(BLOCK_SLOTS)
            offset = 0
        return self._block[offset]

    def _fill_block(self, n_slots: int) -> None:
        lists: list[list[tuple[int, int]]] = [[] for _ in range(n_slots)]
        if isinstance(self.model, BernoulliTraffic):
            rates = np.asarray(self.model.rates, dtype=float)
            for i, rng in enumerate(self._rngs):
                row = rates[i]
                if not row.any():
                    continue
                hits = rng.random((n_slots, self.model.n_outputs)) < row
                for s, j in np.argwhere(hits).tolist():
                    lists[s].append((i, j))
        else:
            for i in range(self.model.n_inputs):
                self._fill_bursty_input(i, lists, n_slots)
        self._block = lists

    def _fill_bursty_input(self, i: int, lists, n_slots: int) -> None:
        model = self.model
        rng = self._rngs[i]
        dest_row = self._dest[i]
        s = 0
        while s < n_slots:
            if self._remaining[i] == 0:
                if self._active[i]:
                    self._active[i] = False
                    self._remaining[i] = int(rng.geometric(self._idle_p)) - 1
                else:
                    self._active[i] = True
                    u = rng.random()
                    length = int(np.searchsorted(self._cdf, u, side="right")) + 1
                    self._remaining[i] = min(length, model.burst_support_max)
                    if model.per_burst_destination:
                        self._burst_dest[i] = int(rng.choice(model.n_outputs, p=dest_row))
                continue
            take = min(self._remaining[i], n_slots - s)
            if self._active[i]:
                if model.per_burst_destination:
                    j = self._burst_dest[i]
                    for t in range(s, s + take):
                        lists[t].append((i, j))
                else:
                    dests = rng.choice(model.n_outputs, size=take, p=dest_row)
                    for t, j in zip(range(s, s + take), dests.tolist()):
                        lists[t].append((i, j))
            self._remaining[i] -= take
            s += take
