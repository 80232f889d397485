"""Figure rendering for experiment reports.

Everything draws through the Agg backend and writes straight to files, so
the CLI can emit figures next to its CSV output on headless machines.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_delay_vs_load(rows, path, title: str = "Mean delay vs port load"):
    """Delay curves, one per policy, averaged across seeds at each load.

    ``rows`` are CSV-shaped dicts with at least policy, load and mean_delay
    (mean_delay may be empty/None for zero-traffic cells, which are skipped).
    """
    series: dict[str, dict[float, list[float]]] = {}
    for row in rows:
        delay = row.get("mean_delay")
        if delay in (None, ""):
            continue
        policy = row["policy"]
        load = float(row["load"])
        series.setdefault(policy, {}).setdefault(load, []).append(float(delay))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for policy in sorted(series):
        by_load = series[policy]
        loads = sorted(by_load)
        means = [sum(by_load[x]) / len(by_load[x]) for x in loads]
        spread = [(max(by_load[x]) - min(by_load[x])) / 2 for x in loads]
        ax.errorbar(loads, means, yerr=spread, marker="o", capsize=3,
                    label=policy)
    ax.set_xlabel("port load")
    ax.set_ylabel("mean delay (slots)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if series:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_clearance_trajectory(reports, path,
                                title: str = "Heaviest port during clearance"):
    """Max-port-weight trajectories of one or more clearance runs."""
    if not isinstance(reports, (list, tuple)):
        reports = [reports]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for report in reports:
        traj = [report.tau_star] + list(report.per_slot_max_port_weight)
        ax.step(range(len(traj)), traj, where="post",
                label=f"{report.policy} ({report.slots_used} slots)")
    ax.set_xlabel("slot")
    ax.set_ylabel("max port weight")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_queue_trajectory(reports, path,
                            title: str = "Heaviest port queue over time"):
    """Downsampled max-port-queue series from simulation reports."""
    if not isinstance(reports, (list, tuple)):
        reports = [reports]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for report in reports:
        if not report.max_port_queue_trajectory:
            continue
        xs, ys = zip(*report.max_port_queue_trajectory)
        ax.plot(xs, ys, label=f"{report.policy} seed={report.seed}")
    ax.set_xlabel("slot")
    ax.set_ylabel("max port queue")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
