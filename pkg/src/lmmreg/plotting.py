"""Matplotlib figures written straight to files (SVG by default)."""

from __future__ import annotations

import matplotlib
from matplotlib.figure import Figure

# fixed ids and no timestamp so reruns produce identical SVG
matplotlib.rcParams["svg.hashsalt"] = "lmmreg"
matplotlib.rcParams["svg.fonttype"] = "none"

LABELS = {
    "accuracy": "correspondence accuracy",
    "mse": "alignment MSE",
    "iterations": "iterations",
    "noise_std": "noise std",
    "noise_count": "noisy points",
    "outliers": "outliers",
}
METHOD_STYLE = {"lmm": ("tab:blue", "o"), "cpd": ("tab:red", "s"), "icp": ("tab:gray", "^")}


def _save(fig: Figure, path) -> None:
    fig.savefig(path, metadata={"Date": None})


def plot_overlay(fixed, moved, outlier_mask, path, title=None) -> None:
    """Fixed points as blue circles, transformed moving points as red crosses,
    fixed points classified as outliers in green."""
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot()
    inl = ~outlier_mask
    ax.scatter(fixed[inl, 0], fixed[inl, 1], s=18, facecolors="none", edgecolors="tab:blue", label="fixed")
    ax.scatter(moved[:, 0], moved[:, 1], s=18, marker="x", color="tab:red", label="moving (registered)")
    if outlier_mask.any():
        ax.scatter(fixed[outlier_mask, 0], fixed[outlier_mask, 1], s=18, color="tab:green", label="outliers")
    ax.set_aspect("equal")
    ax.legend(loc="best", fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_sweep(summary: dict, metric: str, x_axis: str, path) -> None:
    """One line per method; each line group carries the id ``series-<method>``."""
    fig = Figure(figsize=(5, 3.5))
    ax = fig.add_subplot()
    for method, (xs, ys) in summary.items():
        color, marker = METHOD_STYLE.get(method, (None, "o"))
        (line,) = ax.plot(xs, ys, marker=marker, color=color, label=method.upper())
        line.set_gid(f"series-{method}")
    ax.set_xlabel(LABELS.get(x_axis, x_axis))
    ax.set_ylabel(LABELS.get(metric, metric))
    if metric == "mse" and all(y > 0 for _, ys in summary.values() for y in ys):
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
