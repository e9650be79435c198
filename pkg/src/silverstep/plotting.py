"""Figure rendering for experiment runs.

Figures are written next to the CSV output and never influence CSV content
or exit codes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_error_curves(results, path: str, title: str = "") -> None:
    """Mean error per arm against iteration, log-scaled y axis."""
    by_arm: dict[str, list[list[float]]] = {}
    for res in results:
        by_arm.setdefault(res.arm, []).append(res.errors)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for arm in sorted(by_arm):
        curves = by_arm[arm]
        length = max(len(c) for c in curves)
        acc = np.full((len(curves), length), np.nan)
        for row, c in enumerate(curves):
            acc[row, : len(c)] = c
        mean = np.nanmean(acc, axis=0)
        mean = np.where(mean > 0, mean, np.nan)  # log scale cannot show <= 0
        ax.plot(np.arange(length), mean, label=arm, linewidth=1.4)
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean error")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
