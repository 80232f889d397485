"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. The delay and stability criteria simulate millions of slots and take
a few minutes.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from portmatch import checks
from portmatch.checks import random_voq
from portmatch.clearance import bvn_decompose, clearance_example, run_clearance, tau_star
from portmatch.policies import PolicySpec
from portmatch.sim import SimConfig, StopRule, simulate
from portmatch.traffic import BernoulliTraffic, sample_burst_lengths


@contextmanager
def criterion(num, name):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {num} ({name}): FAIL")
        raise
    print(f"\nACCEPTANCE {num} ({name}): PASS")


def test_criterion_1_clearance_optimality():
    with criterion(1, "clearance optimality of port policies"):
        start = time.perf_counter()
        for n in (8, 16):
            for policy in ("critical", "lhpf", "mvm"):
                report = run_clearance(clearance_example(n), policy)
                assert report.slots_used == n, (n, policy, report.slots_used)
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


def test_criterion_2_edge_policies_need_nearly_double():
    with criterion(2, "edge-weighted policies need >= 2N-3 slots"):
        start = time.perf_counter()
        for n in (8, 16, 32):
            for policy in ("mwm", "gmm", "mwm-alpha:0.5", "mwm-zero-plus"):
                report = run_clearance(clearance_example(n), policy)
                assert report.slots_used >= 2 * n - 3, \
                    (n, policy, report.slots_used)
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_criterion_3_critical_drains_max_weight_by_one():
    with criterion(3, "critical-port policy drains the max weight by 1 per slot"):
        rng = np.random.default_rng(1001)
        for _ in range(100):
            voq = random_voq(rng, max_ports=12, max_entry=5)
            floor = tau_star(voq)
            report = run_clearance(voq, "critical")
            assert report.slots_used == floor
            assert report.per_slot_max_port_weight == list(range(floor - 1, -1, -1))


def test_criterion_4_oracle_battery():
    with criterion(4, "oracle battery over 500 random instances"):
        start = time.perf_counter()
        violations = checks.run_battery(
            count=500, max_ports=12, seed=2024, checks=list(checks.CHECKS))
        elapsed = time.perf_counter() - start
        assert violations == [], "\n".join(str(v) for v in violations)
        assert elapsed < 60.0, f"took {elapsed:.2f}s"


def test_criterion_5_bvn_reconstruction():
    with criterion(5, "batch decomposition reconstructs within the floor"):
        start = time.perf_counter()
        rng = np.random.default_rng(1005)
        for _ in range(100):
            voq = random_voq(rng, max_ports=12, max_entry=6)
            decomp = bvn_decompose(voq)
            assert decomp.total_multiplicity() <= tau_star(voq)
            assert decomp.reconstruct() == [list(r) for r in voq]
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


def test_criterion_6_stability_at_high_load():
    with criterion(6, "stable queues at port load 0.9"):
        traffic = BernoulliTraffic.uniform(8, 8, 0.9)
        for policy in ("mvm", "lhpf"):
            for seed in range(3):
                cfg = SimConfig(
                    n_inputs=8, n_outputs=8, policy=PolicySpec.parse(policy),
                    traffic=traffic, seed=(2006, seed), max_slots=500_000,
                    stop_rule=None, track_delays=False,
                    invariant_check_every=10_000)
                rep = simulate(cfg)  # raises if conservation ever breaks
                assert rep.conservation_checks == 50
                q2, q4 = rep.quarter_mean_max_queue[1], rep.quarter_mean_max_queue[3]
                assert q4 <= 2.0 * q2, (policy, seed, q2, q4)


def test_criterion_7_mvm_delay_no_worse_than_mwm():
    with criterion(7, "mvm mean delay <= 1.1x mwm mean delay"):
        traffic_by_load = {load: BernoulliTraffic.uniform(8, 8, load)
                           for load in (0.8, 0.9)}
        for load, traffic in traffic_by_load.items():
            means = {}
            for policy in ("mvm", "mwm"):
                delays = []
                for seed in range(5):
                    cfg = SimConfig(
                        n_inputs=8, n_outputs=8,
                        policy=PolicySpec.parse(policy), traffic=traffic,
                        seed=(2007, seed),  # same arrivals for both policies
                        policy_seed=(2007, seed, 1),
                        max_slots=200_000, stop_rule=StopRule())
                    rep = simulate(cfg)
                    assert rep.mean_delay is not None
                    delays.append(rep.mean_delay)
                means[policy] = sum(delays) / len(delays)
            assert means["mvm"] <= 1.1 * means["mwm"], (load, means)
            print(f"\n  load {load}: mvm {means['mvm']:.3f} vs "
                  f"mwm {means['mwm']:.3f}")


def test_criterion_8_bursty_generator_calibration():
    with criterion(8, "burst length sampler matches the analytic mean"):
        exponent, support = 1.25, 100
        norm = sum(k ** -exponent for k in range(1, support + 1))
        analytic_mean = sum(k ** (1 - exponent) for k in range(1, support + 1)) / norm
        rng = np.random.default_rng(2008)
        samples = sample_burst_lengths(rng, 1_000_000, exponent, support)
        rel_err = abs(float(samples.mean()) - analytic_mean) / analytic_mean
        assert rel_err < 0.02, f"relative error {rel_err:.4%}"
