"""Port-weighted bipartite matching policies and a crossbar switch simulator."""

from .graph import (AlternatingPath, DifferenceComponent, Matching,
                    NodeWeightedBipartiteGraph, PathKind, PortId, Side,
                    find_augment_or_absorb, flip, graph_from_voq, input_port,
                    matching_weight, output_port, symmetric_difference,
                    threshold)
from .policies import (PolicySpec, ScheduleContractError, Scheduler,
                       critical_port_matching, gmm, lhpf_complete, msm, mvm,
                       mvm_via_transform, mwm, mwm_alpha, mwm_zero_plus,
                       random_maximal, voq_edge_weights)
from .clearance import (BvnDecomposition, ClearanceReport, bvn_decompose,
                        clearance_example, run_clearance, tau_star)
from .traffic import (ArrivalGenerator, BernoulliTraffic, BurstyTraffic,
                      epsilon_star, sample_burst_lengths,
                      truncated_power_law_mean)
from .sim import SimConfig, SimReport, StopRule, simulate, step
from .voq import VoqState, load_voq, save_voq

__version__ = "0.1.0"

__all__ = [
    "AlternatingPath", "ArrivalGenerator", "BernoulliTraffic",
    "BurstyTraffic", "BvnDecomposition", "ClearanceReport",
    "DifferenceComponent", "Matching", "NodeWeightedBipartiteGraph",
    "PathKind", "PolicySpec", "PortId", "ScheduleContractError", "Scheduler",
    "Side", "SimConfig", "SimReport", "StopRule", "VoqState",
    "bvn_decompose", "clearance_example", "critical_port_matching",
    "epsilon_star", "find_augment_or_absorb", "flip", "gmm",
    "graph_from_voq", "input_port", "lhpf_complete", "load_voq",
    "matching_weight", "msm", "mvm", "mvm_via_transform", "mwm", "mwm_alpha",
    "mwm_zero_plus", "output_port", "random_maximal", "run_clearance",
    "sample_burst_lengths", "save_voq", "simulate", "step",
    "symmetric_difference", "tau_star", "threshold",
    "truncated_power_law_mean", "voq_edge_weights",
]
