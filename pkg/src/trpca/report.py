"""Decomposition run reports: manifest, history table, and figures.

The manifest is a flat ``key = value`` text file listing every resolved
parameter (defaults included), the iteration history, and the output
paths, so a run can be reproduced from the manifest alone.  The history
table is CSV.  Figures are rendered with the Agg backend and saved next
to the other outputs.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def write_manifest(path, entries: dict) -> None:
    lines = [f"{key} = {value}" for key, value in entries.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path) -> dict:
    """Parse a manifest back into a dict of strings."""
    out: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(" = ")
        if sep:
            out[key] = value
    return out


def write_history_csv(path, result) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["iteration", "threshold", "relative_change"])
        for i, (tau, change) in enumerate(zip(result.thresholds, result.history), start=1):
            writer.writerow([i, repr(tau), repr(change)])


def render_convergence(path, result, eps: float) -> None:
    """Relative change and threshold per sweep on a log scale."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if result.iterations > 0:
        sweeps = np.arange(1, result.iterations + 1)
        ax.semilogy(sweeps, result.history, "o-", label="relative change")
        ax.semilogy(sweeps, result.thresholds, "s--", label="threshold")
    ax.axhline(eps, color="grey", lw=0.8, ls=":", label="stop tolerance")
    ax.set_xlabel("sweep")
    ax.set_ylabel("value")
    ax.set_title("block thresholding convergence")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_montage(path, x, low_rank, sparse) -> None:
    """First/middle/last frames of the input and both components."""
    n3 = x.shape[2]
    picks = sorted({0, n3 // 2, n3 - 1})
    rows = [("input", x), ("low rank", low_rank), ("sparse", sparse)]
    fig, axes = plt.subplots(
        3, len(picks), figsize=(2.6 * len(picks), 7.5), squeeze=False
    )
    for r, (label, tens) in enumerate(rows):
        vmin, vmax = float(tens.min()), float(tens.max())
        if vmax <= vmin:
            vmax = vmin + 1.0
        for c, k in enumerate(picks):
            ax = axes[r][c]
            ax.imshow(tens[:, :, k], cmap="gray", vmin=vmin, vmax=vmax)
            ax.set_xticks([])
            ax.set_yticks([])
            if r == 0:
                ax.set_title(f"frame {k}")
        axes[r][0].set_ylabel(label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
