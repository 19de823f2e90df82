"""Figure rendering for profile and simulation outputs.

Kept separate from the data-producing subcommands so everything except
``report`` stays free of a plotting backend.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_profile_figures(evaluations_csv: Path, front_json: dict,
                           out_dir: Path) -> list[Path]:
    rows = []
    with open(evaluations_csv, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((float(row["B_bps"]), float(row["P_w"]), float(row["A"])))
    front = [(m["metrics"]["bandwidth_bps"], m["metrics"]["power_w"],
              m["metrics"]["accuracy"]) for m in front_json["members"]]

    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    fig = plt.figure(figsize=(7, 5.5))
    ax = fig.add_subplot(projection="3d")
    b, p, a = zip(*rows)
    ax.scatter([x / 1e6 for x in b], p, a, s=6, alpha=0.25, label="evaluated")
    if front:
        fb, fp, fa = zip(*front)
        ax.scatter([x / 1e6 for x in fb], fp, fa, s=24, color="crimson",
                   label="Pareto front")
    ax.set_xlabel("bandwidth (Mbps)")
    ax.set_ylabel("power (W)")
    ax.set_zlabel("accuracy")
    ax.legend(loc="upper left")
    path = out_dir / "pareto_front.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    axes[0].scatter(p, a, s=6, alpha=0.25)
    if front:
        axes[0].scatter(fp, fa, s=24, color="crimson")
    axes[0].set_xlabel("power (W)")
    axes[0].set_ylabel("accuracy")
    axes[1].scatter([x / 1e6 for x in b], a, s=6, alpha=0.25)
    if front:
        axes[1].scatter([x / 1e6 for x in fb], fa, s=24, color="crimson")
    axes[1].set_xlabel("bandwidth (Mbps)")
    axes[1].set_ylabel("accuracy")
    fig.tight_layout()
    path = out_dir / "pareto_projections.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)
    return written


def render_simulation_figures(series_csv: Path, out_dir: Path) -> list[Path]:
    cols: dict[str, list[float]] = {}
    with open(series_csv, newline="") as fh:
        for row in csv.DictReader(fh):
            for k, v in row.items():
                cols.setdefault(k, []).append(float(v))
    hours = [t / 3600.0 for t in cols["t_s"]]

    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    fig, axes = plt.subplots(3, 1, figsize=(9, 8), sharex=True)
    axes[0].plot(hours, cols["soc"], color="tab:blue")
    axes[0].set_ylabel("state of charge")
    axes[0].set_ylim(0, 1.05)
    axes[1].plot(hours, cols["pv_w"], color="tab:orange", label="PV")
    axes[1].plot(hours, cols["load_w"], color="tab:red", label="load")
    axes[1].set_ylabel("Watts")
    axes[1].legend(loc="upper right")
    axes[2].plot(hours, cols["chosen_A"], color="tab:green", label="accuracy")
    ax2 = axes[2].twinx()
    ax2.plot(hours, cols["mbps"], color="tab:purple", alpha=0.6, label="link Mbps")
    axes[2].set_ylabel("chosen accuracy")
    ax2.set_ylabel("link (Mbps)")
    axes[2].set_xlabel("hour of day")
    fig.tight_layout()
    path = out_dir / "simulation_timeline.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)
    return written
