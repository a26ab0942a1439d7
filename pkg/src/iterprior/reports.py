"""Report emission: delimited density/metric files and the matplotlib figures
rendered alongside them.

All figures are written as SVG so artifacts stay diffable and viewable
without a display.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
# deterministic SVG ids so identical inputs rewrite identical artifacts
matplotlib.rcParams["svg.hashsalt"] = "iterprior"

import matplotlib.pyplot as plt
import numpy as np

_SVG_METADATA = {"Date": None}

from .numerics import GRID_AXIS, GRID_POINTS, Density1D, DensityGrid2D

__all__ = [
    "save_density_csv",
    "load_density_csv",
    "plot_density",
    "binned_scatter",
    "save_binned_scatter_csv",
    "plot_fit_scatter",
]


def save_density_csv(density: Density1D | DensityGrid2D, path: str | Path) -> None:
    """Write a density as delimited text.

    1D densities become ``bin_center,mass`` rows; 2D grids become a plain
    101x101 matrix whose row i and column j correspond to w0 = i/100 and
    w1 = j/100.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if isinstance(density, Density1D):
            writer.writerow(["bin_center", "mass"])
            for center, mass in zip(density.centers, density.masses):
                writer.writerow([repr(float(center)), repr(float(mass))])
        else:
            for row in density.masses:
                writer.writerow([repr(float(v)) for v in row])


def load_density_csv(path: str | Path) -> Density1D | DensityGrid2D:
    """Read a density written by :func:`save_density_csv`."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty density file")
    if rows[0] and rows[0][0] == "bin_center":
        centers = np.array([float(r[0]) for r in rows[1:]])
        masses = np.array([float(r[1]) for r in rows[1:]])
        width = centers[1] - centers[0]
        return Density1D(centers[0] - width / 2, centers[-1] + width / 2, masses)
    matrix = np.array([[float(v) for v in row] for row in rows])
    if matrix.shape != (GRID_POINTS, GRID_POINTS):
        raise ValueError(
            f"{path}: expected a {GRID_POINTS}x{GRID_POINTS} matrix, got {matrix.shape}"
        )
    return DensityGrid2D(matrix)


def plot_density(
    density: Density1D | DensityGrid2D,
    path: str | Path,
    samples: np.ndarray | None = None,
    title: str | None = None,
) -> None:
    """Render a density as an SVG figure.

    1D densities draw the smoothed curve, with a histogram of ``samples``
    underneath when given; 2D grids draw a heatmap over the unit square.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    try:
        if isinstance(density, Density1D):
            if samples is not None and len(samples):
                ax.hist(
                    samples,
                    bins=density.edges,
                    density=True,
                    color="0.82",
                    edgecolor="white",
                    label="samples",
                )
            ax.plot(
                density.centers,
                density.masses / density.bin_width,
                color="C0",
                lw=1.8,
                label="smoothed density",
            )
            ax.set_xlim(density.lo, density.hi)
            ax.set_xlabel("hypothesis")
            ax.set_ylabel("density")
            ax.legend(frameon=False, fontsize=9)
        else:
            image = ax.imshow(
                density.masses.T,
                origin="lower",
                extent=(0.0, 1.0, 0.0, 1.0),
                aspect="equal",
                cmap="viridis",
            )
            if samples is not None and len(samples):
                ax.plot(samples[:, 0], samples[:, 1], ".", ms=2.0, color="white", alpha=0.35)
            ax.set_xlabel("w0 (background cause strength)")
            ax.set_ylabel("w1 (candidate cause strength)")
            fig.colorbar(image, ax=ax, label="mass")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    finally:
        plt.close(fig)


def binned_scatter(
    xs: Sequence[float], ys: Sequence[float], n_bins: int = 13
) -> list[dict[str, float]]:
    """Window-bin (x, y) points along x into ``n_bins`` equal-width windows.

    Every window is emitted, empty ones with count 0 and nan summaries, so a
    requested bin count is always the row count.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size == 0:
        raise ValueError("no points to bin")
    lo, hi = float(xs.min()), float(xs.max())
    if lo == hi:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, n_bins + 1)
    rows = []
    for b in range(n_bins):
        inside = (xs >= edges[b]) & ((xs < edges[b + 1]) | (b == n_bins - 1))
        n = int(inside.sum())
        if n:
            mean_x = float(xs[inside].mean())
            mean_y = float(ys[inside].mean())
            se_y = float(ys[inside].std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        else:
            mean_x = mean_y = se_y = float("nan")
        rows.append(
            {
                "bin_lo": float(edges[b]),
                "bin_hi": float(edges[b + 1]),
                "count": n,
                "mean_x": mean_x,
                "mean_y": mean_y,
                "se_y": se_y,
            }
        )
    return rows


def save_binned_scatter_csv(rows: list[dict[str, float]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["bin_lo", "bin_hi", "count", "mean_x", "mean_y", "se_y"])
        writer.writeheader()
        writer.writerows(rows)


def plot_fit_scatter(
    series: dict[str, tuple[Sequence[float], Sequence[float]]],
    path: str | Path,
    n_bins: int = 13,
    title: str | None = None,
) -> None:
    """Model predictions vs judgments, window-binned with standard-error bars.

    ``series`` maps a label (one per prior) to its (predictions, judgments)
    point lists.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.6))
    try:
        for label, (xs, ys) in series.items():
            rows = [r for r in binned_scatter(xs, ys, n_bins=n_bins) if r["count"] > 0]
            ax.errorbar(
                [r["mean_x"] for r in rows],
                [r["mean_y"] for r in rows],
                yerr=[r["se_y"] for r in rows],
                fmt="o-",
                ms=4,
                lw=1.2,
                capsize=2,
                label=label,
            )
        ax.plot([0, 1], [0, 1], "--", color="0.6", lw=1.0)
        ax.set_xlabel("model prediction")
        ax.set_ylabel("recorded judgment")
        ax.set_xlim(-0.02, 1.02)
        ax.set_ylim(-0.02, 1.02)
        ax.legend(frameon=False, fontsize=9)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    finally:
        plt.close(fig)
