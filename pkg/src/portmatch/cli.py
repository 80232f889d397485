"""Command-line front end.

Subcommands: ``clear`` (drain an initial loading under one policy),
``simulate`` (delay sweeps over loads x policies x seeds, CSV out, optional
figures), ``verify`` (randomized cross-validation battery) and
``decompose`` (batch decomposition of a loading into matchings).

Exit codes: 0 success, 1 property violation, 2 usage error. Any command is
deterministic under a fixed seed. Config files are flat ``key=value`` text;
explicit flags override file values. The PORTMATCH_THREADS environment
variable caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from . import checks
from .clearance import bvn_decompose, clearance_example, run_clearance, tau_star
from .policies import PolicySpec
from .sim import SimConfig, SimReport, StopRule, simulate
from .traffic import BernoulliTraffic, BurstyTraffic
from .voq import load_voq

CSV_COLUMNS = ["policy", "n1", "n2", "traffic", "load", "seed", "slots",
               "mean_delay", "ci99", "max_q_final", "stop_reason"]


# ---------------------------------------------------------------------------
# config files

def parse_config_text(text: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def format_config(values: dict[str, str]) -> str:
    return "".join(f"{k}={v}\n" for k, v in sorted(values.items()))


def _config_argv(path: str) -> list[str]:
    """Turn a config file into option tokens prepended before user flags."""
    with open(path, "r", encoding="utf-8") as fh:
        values = parse_config_text(fh.read())
    tokens: list[str] = []
    for key, value in values.items():
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                tokens.append(flag)
        else:
            tokens.extend([flag, value])
    return tokens


def _save_config(args: argparse.Namespace, path: str, keys: list[str]) -> None:
    values = {}
    for key in keys:
        value = getattr(args, key.replace("-", "_"))
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        values[key.replace("_", "-")] = str(value)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_config(values))


# ---------------------------------------------------------------------------
# helpers

def _thread_count(requested: Optional[int]) -> int:
    env = os.environ.get("PORTMATCH_THREADS")
    cap = int(env) if env else 0
    n = requested if requested else (cap if cap > 0 else 1)
    if cap > 0:
        n = min(n, cap)
    return max(1, n)


def _parse_policies(text: str) -> list[PolicySpec]:
    return [PolicySpec.parse(tok) for tok in text.split(",") if tok.strip()]


def _parse_loads(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def _simulate_cell(config: SimConfig) -> SimReport:
    return simulate(config)


# ---------------------------------------------------------------------------
# subcommands

def cmd_clear(args: argparse.Namespace) -> int:
    if args.instance:
        voq = load_voq(args.instance)
    else:
        voq = clearance_example(args.n)
    report = run_clearance(voq, args.policy, seed=args.seed,
                           keep_schedule=args.show_schedule)
    verdict = "OPTIMAL" if report.optimal else "SUBOPTIMAL"
    print(f"policy={report.policy} n1={voq.n_inputs} n2={voq.n_outputs} "
          f"tau_star={report.tau_star} slots_used={report.slots_used} "
          f"verdict={verdict}")
    if args.show_schedule and report.schedule is not None:
        for slot, m in enumerate(report.schedule):
            pairs = " ".join(f"{i}->{j}" for (i, j) in m.pairs)
            print(f"slot {slot}: {pairs}")
    if args.plot:
        from . import plotting
        plotting.render_clearance_trajectory(report, args.plot)
        print(f"figure written to {args.plot}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    n1 = args.n
    n2 = args.n2 if args.n2 else args.n
    loads = _parse_loads(args.loads)
    specs = _parse_policies(args.policies)
    stop_rule = None if args.no_ci else StopRule(
        ci_relative_halfwidth=args.ci_target)

    cells: list[SimConfig] = []
    keys: list[tuple[float, str, int]] = []
    for load in loads:
        if args.traffic == "bernoulli":
            traffic = BernoulliTraffic.uniform(n1, n2, load)
        else:
            traffic = BurstyTraffic.symmetric(
                n1, n2, load, zipf_exponent=args.zipf,
                burst_support_max=args.support,
                per_burst_destination=not args.per_packet_dest)
        for p_idx, spec in enumerate(specs):
            for seed in range(args.seeds):
                # arrival streams depend only on (master seed, seed index):
                # the same sample path is replayed against every policy
                cells.append(SimConfig(
                    n_inputs=n1, n_outputs=n2, policy=spec, traffic=traffic,
                    seed=(args.master_seed, seed),
                    policy_seed=(args.master_seed, 7000 + p_idx, seed),
                    max_slots=args.max_slots, stop_rule=stop_rule,
                    warmup_fraction=args.warmup,
                    strict_admissibility=args.strict))
                keys.append((load, spec.label, seed))

    threads = _thread_count(args.threads)
    if threads > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_simulate_cell, cells))
    else:
        reports = [_simulate_cell(c) for c in cells]

    rows = []
    for (load, label, seed), rep in zip(keys, reports):
        rows.append({
            "policy": label, "n1": rep.n_inputs, "n2": rep.n_outputs,
            "traffic": rep.traffic, "load": f"{load:g}", "seed": seed,
            "slots": rep.slots_run, "mean_delay": _fmt(rep.mean_delay),
            "ci99": _fmt(rep.ci99_halfwidth),
            "max_q_final": rep.final_max_port_queue,
            "stop_reason": rep.stop_reason})

    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()

    if args.plot_dir:
        from . import plotting
        os.makedirs(args.plot_dir, exist_ok=True)
        traffic_labels = sorted({r["traffic"] for r in rows})
        for label in traffic_labels:
            subset = [r for r in rows if r["traffic"] == label]
            path = os.path.join(args.plot_dir, f"delay_vs_load_{label}.png")
            plotting.render_delay_vs_load(
                subset, path, title=f"Mean delay vs load ({label}, {n1}x{n2})")
            print(f"figure written to {path}", file=sys.stderr)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    selected = [args.lemma] if args.lemma else None
    violations = checks.run_battery(count=args.random, max_ports=args.max_ports,
                                    seed=args.seed, checks=selected,
                                    stop_on_first=True)
    names = selected if selected else sorted(checks.CHECKS)
    if violations:
        for v in violations:
            print(str(v), file=sys.stderr)
        print(f"verify: FAIL ({len(violations)} violation(s))")
        return 1
    print(f"verify: OK ({args.random} instances, {len(names)} checks)")
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    voq = load_voq(args.instance)
    floor = tau_star(voq)
    decomp = bvn_decompose(voq)
    for m, k in zip(decomp.matchings, decomp.multiplicities):
        pairs = " ".join(f"{i}->{j}" for (i, j) in m.pairs)
        print(f"x{k}: {pairs}")
    exact = decomp.reconstruct() == voq.as_matrix()
    total = decomp.total_multiplicity()
    print(f"total_multiplicity={total} tau_star={floor} "
          f"reconstruction={'OK' if exact else 'FAIL'}")
    if not exact or total > floor:
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="portmatch",
        description="Port-weighted switch scheduling experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_clear = sub.add_parser("clear", help="drain an initial loading")
    p_clear.add_argument("--config", help="key=value config file")
    p_clear.add_argument("--save-config", help="write the effective config")
    p_clear.add_argument("--n", type=int, default=8,
                         help="size of the built-in adversarial example")
    p_clear.add_argument("--instance", help="VOQ file instead of the example")
    p_clear.add_argument("--policy", default="critical",
                         help="critical|lhpf|mvm|mvm-transform|mwm|"
                              "mwm-alpha:A|mwm-zero-plus|msm|gmm|random")
    p_clear.add_argument("--seed", type=int, default=0)
    p_clear.add_argument("--show-schedule", action="store_true")
    p_clear.add_argument("--plot", help="write a trajectory figure to this file")
    p_clear.set_defaults(func=cmd_clear)

    p_sim = sub.add_parser("simulate", help="delay sweep, CSV to stdout or file")
    p_sim.add_argument("--config", help="key=value config file")
    p_sim.add_argument("--save-config", help="write the effective config")
    p_sim.add_argument("--n", type=int, default=8)
    p_sim.add_argument("--n2", type=int, default=0,
                       help="outputs (defaults to --n)")
    p_sim.add_argument("--traffic", choices=["bernoulli", "bursty"],
                       default="bernoulli")
    p_sim.add_argument("--loads", default="0.5,0.8,0.9",
                       help="comma-separated port loads")
    p_sim.add_argument("--policies", default="mvm,mwm",
                       help="comma-separated policy names")
    p_sim.add_argument("--seeds", type=int, default=1,
                       help="number of seeds per cell")
    p_sim.add_argument("--master-seed", type=int, default=0)
    p_sim.add_argument("--zipf", type=float, default=1.25,
                       help="burst-length power exponent (bursty)")
    p_sim.add_argument("--support", type=int, default=100,
                       help="largest burst length (bursty)")
    p_sim.add_argument("--per-packet-dest", action="store_true",
                       help="draw a destination per packet instead of per burst")
    p_sim.add_argument("--max-slots", type=int, default=200_000)
    p_sim.add_argument("--ci-target", type=float, default=0.01,
                       help="stop when the 99%% CI halfwidth is inside this "
                            "fraction of the mean")
    p_sim.add_argument("--no-ci", action="store_true",
                       help="disable the CI stop rule, run exactly max-slots")
    p_sim.add_argument("--warmup", type=float, default=0.1,
                       help="fraction of slots discarded from delay stats")
    p_sim.add_argument("--strict", action="store_true",
                       help="reject inadmissible traffic")
    p_sim.add_argument("--out", help="CSV output path (default stdout)")
    p_sim.add_argument("--plot-dir", help="also render figures into this directory")
    p_sim.add_argument("--threads", type=int, default=0,
                       help="parallel sweep cells (capped by PORTMATCH_THREADS)")
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="randomized property battery")
    p_ver.add_argument("--random", type=int, default=300,
                       help="number of random instances")
    p_ver.add_argument("--max-ports", type=int, default=12)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--lemma", help="run a single named check; one of: "
                                       + ", ".join(sorted(checks.CHECKS)))
    p_ver.set_defaults(func=cmd_verify)

    p_dec = sub.add_parser("decompose", help="batch decomposition of a VOQ file")
    p_dec.add_argument("--instance", required=True, help="VOQ file")
    p_dec.set_defaults(func=cmd_decompose)

    return parser


_CONFIGURABLE = {
    "clear": ["n", "instance", "policy", "seed", "show_schedule", "plot"],
    "simulate": ["n", "n2", "traffic", "loads", "policies", "seeds",
                 "master_seed", "zipf", "support", "per_packet_dest",
                 "max_slots", "ci_target", "no_ci", "warmup", "strict",
                 "out", "plot_dir", "threads"],
}


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # expand --config into leading option tokens so explicit flags win
    if argv and argv[0] in _CONFIGURABLE and "--config" in argv:
        idx = argv.index("--config")
        if idx + 1 >= len(argv):
            parser.error("--config needs a file path")
        try:
            injected = _config_argv(argv[idx + 1])
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        argv = [argv[0]] + injected + argv[1:idx] + argv[idx + 2:]
    args = parser.parse_args(argv)
    if getattr(args, "save_config", None):
        _save_config(args, args.save_config, _CONFIGURABLE[args.command])
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
