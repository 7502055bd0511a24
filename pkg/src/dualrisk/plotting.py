"""Figures written next to the delimited reports.

matplotlib is imported lazily with the Agg backend so the numerical core
never pays for it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_sweep(rows: Sequence[dict], parameter: str, path: str | Path, columns: Sequence[str]) -> Path:
    """One panel per numeric column against the swept parameter."""
    plt = _pyplot()
    path = Path(path)
    xs = [row["value"] for row in rows]
    numeric = [c for c in columns if c not in ("parameter", "value")
               and all(isinstance(row[c], float) for row in rows)
               and len({row[c] for row in rows}) > 1]
    ncols = 2
    nrows = max(1, (len(numeric) + ncols - 1) // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(8, 2.4 * nrows), squeeze=False, sharex=True)
    for ax, col in zip(axes.flat, numeric):
        ax.plot(xs, [row[col] for row in rows], marker="." if len(xs) < 60 else None, lw=1.2)
        ax.set_ylabel(col, fontsize=8)
        ax.grid(alpha=0.3)
        ax.tick_params(labelsize=7)
    for ax in list(axes.flat)[len(numeric):]:
        ax.set_visible(False)
    for ax in axes[-1]:
        ax.set_xlabel(parameter)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_policy(ps, solution, path: str | Path, n: int = 400) -> Path:
    """Revenue and coverage fraction over the feasible interval, optimum marked."""
    import numpy as np

    from .policy import insurer_objective

    plt = _pyplot()
    path = Path(path)
    lo, hi = solution.admissible_interval
    xs = np.linspace(lo, hi, n)
    values = insurer_objective(ps, xs)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    ax1.plot(xs, values.objective, lw=1.4)
    ax1.axvline(solution.x_star, color="k", ls="--", lw=0.8)
    ax1.set_ylabel("insurer objective")
    ax2.plot(xs, values.alpha, lw=1.4, color="C1")
    ax2.axvline(solution.x_star, color="k", ls="--", lw=0.8)
    ax2.set_ylabel("coverage fraction")
    ax2.set_xlabel("probability reduction x")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
