"""Figures for the report commands. Files only; never opens a window."""

from __future__ import annotations

from pathlib import Path

import matplotlib as mpl

mpl.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

mpl.rcParams.update({
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (4.5, 3.2),
    "savefig.dpi": 150,
})


def new(nrows: int = 1, ncols: int = 1):
    return plt.subplots(nrows=nrows, ncols=ncols)


def save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def success_rates(rows: list[dict], path: str | Path) -> Path:
    """Bar chart of pipeline success rate per board size."""
    fig, ax = new()
    ns = [r["n"] for r in rows]
    rates = [r["success_rate"] for r in rows]
    ax.bar([str(n) for n in ns], rates, color="0.4")
    ax.axhline(0.9, color="k", ls="--", lw=0.8)
    ax.set_ylim(0, 1.05)
    ax.set_xlabel("n")
    ax.set_ylabel("success rate")
    return save(fig, path)


def duality_gaps(rows: list[dict], path: str | Path) -> Path:
    fig, ax = new()
    ax.plot([r["n"] for r in rows], [r["packing"] for r in rows], "o-", label="packing", color="k")
    ax.plot([r["n"] for r in rows], [r["cover"] for r in rows], "x--", label="cover", color="0.5")
    ax.set_xlabel("n")
    ax.set_ylabel("LP value")
    ax.legend(frameon=False)
    return save(fig, path)


def thresholds(rows: list[dict], path: str | Path) -> Path:
    """qc(n) against its fractional counterpart."""
    fig, ax = new()
    rows = [r for r in rows if r["qc"] is not None]
    ns = [r["n"] for r in rows]
    ax.plot(ns, [r["qc"] for r in rows], "o-", color="k", label="qc")
    frac = [(r["n"], r["qc_fractional"]) for r in rows if r["qc_fractional"] is not None]
    if frac:
        ax.plot(*zip(*frac), "s--", color="0.5", label="fractional")
    ax.set_xlabel("n")
    ax.set_ylabel("threshold")
    ax.legend(frameon=False)
    return save(fig, path)


def weighting_grid(grid: np.ndarray, path: str | Path) -> Path:
    """Heat map of a square weighting, rows top to bottom."""
    fig, ax = new()
    im = ax.imshow(np.asarray(grid, dtype=float), cmap="Greys", vmin=0, vmax=1)
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("column")
    ax.set_ylabel("row")
    return save(fig, path)
