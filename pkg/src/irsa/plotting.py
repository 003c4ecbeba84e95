"""Figures for sweep results: simulation solid, prediction dashed, floor dotted."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import PointResult  # noqa: E402

QUANTITIES = {
    "fer": ("fer", "fep_pred", "fep_floor", "frame error probability"),
    "plr": ("plr", "plp_pred", "plp_floor", "packet loss probability"),
}


def _column(rows: Sequence[PointResult], name: str):
    values = [getattr(r, name) for r in rows]
    if any(v is None for v in values):
        return None
    return values


def plot_curves(
    curves: Mapping[str, Sequence[PointResult]],
    quantity: str = "fer",
    title: str | None = None,
    ax=None,
):
    """Draw one colour per distribution on a log-scale axis and return it."""
    sim_col, pred_col, floor_col, label = QUANTITIES[quantity]
    if ax is None:
        _, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, (name, rows) in enumerate(curves.items()):
        color = f"C{i}"
        g = [r.g for r in rows]
        sim = [v if v > 0 else float("nan") for v in _column(rows, sim_col)]
        ax.semilogy(g, sim, "-", color=color, marker="o", ms=3, label=f"{name} sim")
        pred = _column(rows, pred_col)
        if pred is not None:
            ax.semilogy(g, pred, "--", color=color, label=f"{name} scaling")
        floor = _column(rows, floor_col)
        if floor is not None:
            ax.semilogy(g, floor, ":", color=color, label=f"{name} floor")
    ax.set_xlabel("channel load g")
    ax.set_ylabel(label)
    ax.set_ylim(bottom=1e-6, top=1.5)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small", ncol=2)
    if title:
        ax.set_title(title)
    return ax


def save_figure(curves, path: str | Path, quantity: str = "fer", title: str | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    plot_curves(curves, quantity, title, ax=ax)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
