"""Figure rendering for the benchmark harness.

Every CLI report path writes a PNG next to its CSV: learning curves with a
mean +/- std band for training runs, per-seed bars for model selection, and
the running match score for online mode. Everything renders headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .agents.records import RunRecord

_STYLE = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
}


def _new_axes():
    plt.rcParams.update(_STYLE)
    return plt.subplots()


def save_learning_curves(
    records: dict[int, RunRecord],
    mean_rows: list[tuple[int, float, float]],
    path: str | Path,
    title: str = "",
) -> Path:
    """Per-seed traces plus the mean +/- std band; x axis is env steps."""
    fig, ax = _new_axes()
    for seed, record in sorted(records.items()):
        steps = [row[0] for row in record.rows]
        values = [row[1] for row in record.rows]
        ax.plot(steps, values, alpha=0.35, linewidth=1.0, label=f"seed {seed}")
    if mean_rows:
        steps = [r[0] for r in mean_rows]
        means = [r[1] for r in mean_rows]
        stds = [r[2] for r in mean_rows]
        ax.plot(steps, means, color="black", linewidth=1.8, label="mean")
        ax.fill_between(
            steps,
            [m - s for m, s in zip(means, stds)],
            [m + s for m, s in zip(means, stds)],
            color="black",
            alpha=0.15,
        )
    ax.set_xlabel("env steps")
    ax.set_ylabel("trailing-100-episode mean return")
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def save_dev_scores(dev_scores: dict[int, float], path: str | Path, metric_name: str) -> Path:
    """Bar chart of per-seed validation scores used for model selection."""
    fig, ax = _new_axes()
    seeds = sorted(dev_scores)
    ax.bar([str(s) for s in seeds], [dev_scores[s] for s in seeds], color="#4878a8")
    ax.set_xlabel("seed")
    ax.set_ylabel(f"dev {metric_name}")
    ax.set_ylim(0.0, 1.05)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def save_online_curve(rows: list[tuple[int, float]], path: str | Path) -> Path:
    """Running match score over the one-pass online loop."""
    fig, ax = _new_axes()
    ax.plot([r[0] for r in rows], [r[1] for r in rows], marker="o", markersize=3)
    ax.set_xlabel("samples seen")
    ax.set_ylabel("running match score (window of 50)")
    ax.set_ylim(-0.02, 1.05)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path
