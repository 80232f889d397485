import numpy as np
import pytest

from portmatch.checks import random_voq
from portmatch.clearance import (bvn_decompose, clearance_example,
                                 run_clearance, tau_star)
from portmatch.voq import VoqState, load_voq, save_voq


# --- tau_star ---------------------------------------------------------------

def test_tau_star_zero_matrix():
    assert tau_star([[0, 0], [0, 0]]) == 0


def test_tau_star_of_adversarial_instances():
    for n in (2, 4, 8, 16):
        assert tau_star(clearance_example(n)) == n


def test_tau_star_column_dominated():
    assert tau_star([[2, 0], [1, 1]]) == 3  # output 0 weighs 3


# --- the adversarial instance -----------------------------------------------

def test_clearance_example_shape():
    v = clearance_example(4)
    assert v.row_sums == [3, 3, 3, 3]
    assert v.col_sums == [4, 4, 4, 0]


def test_clearance_example_smallest():
    assert clearance_example(2).as_matrix() == [[1, 0], [1, 0]]
    assert tau_star(clearance_example(2)) == 2


def test_clearance_example_rejects_tiny_n():
    with pytest.raises(ValueError):
        clearance_example(1)


# --- clearance runs ---------------------------------------------------------

def test_zero_loading_clears_instantly():
    report = run_clearance([[0, 0], [0, 0]], "mvm")
    assert report.slots_used == 0
    assert report.optimal


def test_port_policies_clear_at_the_floor():
    v = clearance_example(8)
    for policy in ("critical", "lhpf", "mvm"):
        report = run_clearance(v, policy)
        assert report.slots_used == 8 == report.tau_star, policy


def test_mwm_needs_nearly_twice_the_floor():
    report = run_clearance(clearance_example(8), "mwm")
    assert report.slots_used >= 13
    assert not report.optimal


def test_critical_policy_drains_one_per_slot():
    rng = np.random.default_rng(20)
    for _ in range(40):
        voq = random_voq(rng, max_ports=10)
        floor = tau_star(voq)
        report = run_clearance(voq, "critical")
        assert report.slots_used == floor
        assert report.per_slot_max_port_weight == list(range(floor - 1, -1, -1))


def test_any_policy_meets_the_floor_and_replay_is_exact():
    rng = np.random.default_rng(21)
    for policy in ("mvm", "mwm", "gmm", "msm", "random"):
        voq = random_voq(rng, max_ports=10)
        report = run_clearance(voq, policy, seed=3, keep_schedule=True)
        assert report.slots_used >= tau_star(voq)
        assert len(report.schedule) == report.slots_used
        state = VoqState(voq)
        for m in report.schedule:
            for (i, j) in m.pairs:
                state.remove_head(i, j)  # raises if any entry would go negative
        assert state.is_empty()


def test_stuck_policy_trips_the_safety_cap(monkeypatch):
    from portmatch import policies as pol
    from portmatch.graph import Matching

    class IdleScheduler:
        def __init__(self, *a, **k):
            pass

        def matching(self, voq):
            return Matching()

    monkeypatch.setattr("portmatch.clearance.Scheduler", IdleScheduler)
    with pytest.raises(RuntimeError, match="safety cap"):
        run_clearance([[1]], "mvm")


# --- batch decomposition ----------------------------------------------------

def test_bvn_scaled_identity():
    d = bvn_decompose([[5, 0], [0, 5]])
    assert len(d.matchings) == 1
    assert d.multiplicities == [5]
    assert d.reconstruct() == [[5, 0], [0, 5]]


def test_bvn_all_ones():
    d = bvn_decompose([[1, 1], [1, 1]])
    assert d.multiplicities == [1, 1]
    assert all(len(m) == 2 for m in d.matchings)
    assert d.total_multiplicity() == 2 == tau_star([[1, 1], [1, 1]])


def test_bvn_adversarial_instance():
    v = clearance_example(4)
    d = bvn_decompose(v)
    assert d.total_multiplicity() <= 4
    assert d.reconstruct() == v.as_matrix()


def test_bvn_empty_loading():
    d = bvn_decompose([[0, 0], [0, 0]])
    assert d.matchings == [] and d.multiplicities == []
    assert d.reconstruct() == [[0, 0], [0, 0]]


def test_bvn_random_instances_reconstruct_within_floor():
    rng = np.random.default_rng(22)
    for _ in range(60):
        voq = random_voq(rng, max_ports=10)
        d = bvn_decompose(voq)
        assert d.reconstruct() == [list(r) for r in voq]
        assert d.total_multiplicity() <= tau_star(voq)


# --- VOQ file format --------------------------------------------------------

def test_voq_file_round_trip(tmp_path):
    mat = [[2, 0, 1], [0, 3, 0]]
    path = tmp_path / "load.voq"
    save_voq(mat, path)
    assert path.read_text() == "2 3\n2 0 1\n0 3 0\n"
    assert load_voq(path).as_matrix() == mat


def test_voq_file_rejects_bad_content(tmp_path):
    path = tmp_path / "bad.voq"
    path.write_text("2 2\n1 2 3\n")
    with pytest.raises(ValueError):
        load_voq(path)
    path.write_text("2 x\n1 2\n3 4\n")
    with pytest.raises(ValueError):
        load_voq(path)
