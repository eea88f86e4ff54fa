"""Static SVG line plots regenerated from the run CSVs."""
from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "phiaixi"


def _read(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_learning_curve(csv_path, svg_path, title: str = "reward per cycle") -> None:
    header, rows = _read(csv_path)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if rows:
        ax.plot([int(r[0]) for r in rows], [float(r[2]) for r in rows], lw=1.2)
        ax.set_title(f"{title} (moving average, window {rows[0][1]})")
    ax.set_xlabel("step")
    ax.set_ylabel("reward")
    _save(fig, svg_path)


def plot_actions(csv_path, svg_path) -> None:
    header, rows = _read(csv_path)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if rows:
        t = [int(r[0]) for r in rows]
        for j, name in enumerate(header[2:], start=2):
            ax.plot(t, [100 * float(r[j]) for r in rows], lw=1.0, label=name)
        ax.legend(fontsize=6, ncol=2)
        ax.set_title(f"action mix (moving average, window {rows[0][1]})")
    ax.set_xlabel("step")
    ax.set_ylabel("% of steps")
    _save(fig, svg_path)


def plot_cost_curve(csv_path, svg_path) -> None:
    header, rows = _read(csv_path)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    n = [int(r[0]) for r in rows]
    ax.plot(n, [float(r[1]) for r in rows], label="Cost_M / n")
    ax.plot(n, [float(r[2]) for r in rows], label="Cost_M0 / n")
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.legend()
    _save(fig, svg_path)


def plot_csv(csv_path, svg_path) -> None:
    """Pick the plot type from the CSV header."""
    header, _ = _read(csv_path)
    if header[:3] == ["t", "window", "reward_ma"]:
        plot_learning_curve(csv_path, svg_path)
    elif header[:2] == ["t", "window"]:
        plot_actions(csv_path, svg_path)
    elif header[:1] == ["n"]:
        plot_cost_curve(csv_path, svg_path)
    else:
        raise ValueError(f"{csv_path}: unrecognised CSV layout {header}")
