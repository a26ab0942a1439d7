"""Grid-based Bayesian models of causal strength judgments.

Three priors over (w0, w1) are supported on the fixed 101x101 grid: uniform,
a sparse-and-strong two-exponential form favoring one strong and one weak
cause, and an arbitrary empirical grid (typically the kernel-smoothed output
of an iterated-learning ensemble). Posterior means over a sweep of
contingency observations are compared against recorded judgments with
Pearson's r and RMSD.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegeneratePosteriorError
from .likelihoods import (
    CausalDirection,
    CausalObservation,
    causal_log_likelihood_grid,
)
from .numerics import GRID_AXIS, DensityGrid2D, pearson_r, rmsd

__all__ = [
    "UniformPrior",
    "SparseStrongPrior",
    "EmpiricalPrior",
    "prior_grid",
    "posterior_grid",
    "posterior_mean",
    "JudgmentItem",
    "generate_judgment_items",
    "predict_judgments",
    "FitMetrics",
    "fit_metrics",
    "read_judgments_csv",
    "write_judgments_csv",
]

_W0_MESH, _W1_MESH = np.meshgrid(GRID_AXIS, GRID_AXIS, indexing="ij")


@dataclass(frozen=True)
class UniformPrior:
    """Equal mass on every grid cell."""

    def display(self) -> str:
        return "uniform"


@dataclass(frozen=True)
class SparseStrongPrior:
    """Two-exponential prior favoring one strong cause and one weak cause.

    At alpha = 0 it reduces to the uniform prior; larger alpha concentrates
    mass near the sparse-strong corners.
    """

    alpha: float = 5.0
    direction: CausalDirection = CausalDirection.GENERATIVE

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")

    def display(self) -> str:
        return f"sparse-strong(alpha={self.alpha:g}, {self.direction.value})"


@dataclass(frozen=True)
class EmpiricalPrior:
    """A prior given directly as a normalized grid."""

    grid: DensityGrid2D

    def display(self) -> str:
        return "empirical"


PriorSpec = UniformPrior | SparseStrongPrior | EmpiricalPrior


def prior_grid(spec: PriorSpec) -> DensityGrid2D:
    """Materialize a prior specification on the 101x101 grid."""
    if isinstance(spec, UniformPrior):
        return DensityGrid2D.uniform()
    if isinstance(spec, EmpiricalPrior):
        return spec.grid
    a = spec.alpha
    if spec.direction is CausalDirection.GENERATIVE:
        weights = np.exp(-a * (_W0_MESH + 1.0 - _W1_MESH)) + np.exp(
            -a * (1.0 - _W0_MESH + _W1_MESH)
        )
    else:
        weights = np.exp(-a * (1.0 - _W0_MESH + 1.0 - _W1_MESH)) + np.exp(
            -a * (1.0 - _W0_MESH + _W1_MESH)
        )
    return DensityGrid2D.from_weights(weights)


def posterior_grid(
    prior: DensityGrid2D, d: CausalObservation, direction: CausalDirection
) -> DensityGrid2D:
    """Cellwise prior times likelihood, max-shifted and renormalized."""
    loglik = causal_log_likelihood_grid(d, direction, _W0_MESH, _W1_MESH)
    shift = loglik.max()
    if not np.isfinite(shift):
        raise DegeneratePosteriorError("observation has zero likelihood on the whole grid")
    weights = prior.masses * np.exp(loglik - shift)
    total = weights.sum()
    if not total > 0.0:
        raise DegeneratePosteriorError("posterior carries no mass anywhere on the grid")
    return DensityGrid2D(weights / total)


def posterior_mean(grid: DensityGrid2D) -> tuple[float, float]:
    """Mass-weighted means of (w0, w1)."""
    return grid.mean()


@dataclass(frozen=True)
class JudgmentItem:
    """One contingency table shown to an agent, with optional paired estimates."""

    observation: CausalObservation
    direction: CausalDirection
    model_prediction: tuple[float, float] | None = None
    agent_judgment: tuple[float, float] | None = None


_GROUP_SIZES = (8, 16, 32)
# effect counts sweep 0..size at the step keeping nine levels per size
_SWEEP_STEPS = {8: 1, 16: 2, 32: 4}


def generate_judgment_items(
    directions: Iterable[CausalDirection] = (
        CausalDirection.GENERATIVE,
        CausalDirection.PREVENTIVE,
    ),
) -> list[JudgmentItem]:
    """The full judgment sweep: every group-size pair and effect-count level.

    Group sizes take values in {8, 16, 32} independently per group; effect
    counts sweep 0..size at step size/8, giving nine levels per group and
    729 items per causal direction.
    """
    items: list[JudgmentItem] = []
    for direction in directions:
        for n_plus in _GROUP_SIZES:
            for n_minus in _GROUP_SIZES:
                for k_plus in range(0, n_plus + 1, _SWEEP_STEPS[n_plus]):
                    for k_minus in range(0, n_minus + 1, _SWEEP_STEPS[n_minus]):
                        items.append(
                            JudgmentItem(
                                observation=CausalObservation(
                                    n_c_plus=n_plus,
                                    n_c_minus=n_minus,
                                    k_plus=k_plus,
                                    k_minus=k_minus,
                                ),
                                direction=direction,
                            )
                        )
    return items


def predict_judgments(prior: DensityGrid2D, items: Sequence[JudgmentItem]) -> list[JudgmentItem]:
    """Fill each item's model prediction with its posterior mean under ``prior``."""
    out = []
    for item in items:
        post = posterior_grid(prior, item.observation, item.direction)
        out.append(replace(item, model_prediction=posterior_mean(post)))
    return out


class FitMetrics(NamedTuple):
    pearson: float
    rmsd: float


def fit_metrics(predictions: Sequence[float], judgments: Sequence[float]) -> FitMetrics:
    """Pearson's r and RMSD between flattened prediction/judgment values."""
    return FitMetrics(
        pearson=pearson_r(predictions, judgments),
        rmsd=rmsd(predictions, judgments),
    )


# ---------------------------------------------------------------------------
# Judgment fixture files
# ---------------------------------------------------------------------------

_CSV_FIELDS = ["direction", "n_c_plus", "n_c_minus", "k_plus", "k_minus", "judged_w0", "judged_w1"]


def write_judgments_csv(items: Sequence[JudgmentItem], path: str | Path) -> None:
    """Write judged items as the delimited fixture format."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_FIELDS)
        for item in items:
            if item.agent_judgment is None:
                raise ValueError("cannot write an item with no agent judgment")
            obs = item.observation
            writer.writerow(
                [
                    item.direction.value,
                    obs.n_c_plus,
                    obs.n_c_minus,
                    obs.k_plus,
                    obs.k_minus,
                    repr(item.agent_judgment[0]),
                    repr(item.agent_judgment[1]),
                ]
            )


def read_judgments_csv(path: str | Path) -> list[JudgmentItem]:
    """Read judged items; raises ``ValueError`` naming the offending row."""
    items: list[JudgmentItem] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty judgments file") from None
        if [h.strip() for h in header] != _CSV_FIELDS:
            raise ValueError(f"{path}: row 1: expected header {','.join(_CSV_FIELDS)}")
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                direction = CausalDirection(row[0].strip())
                obs = CausalObservation(
                    n_c_plus=int(row[1]),
                    n_c_minus=int(row[2]),
                    k_plus=int(row[3]),
                    k_minus=int(row[4]),
                )
                judged = (float(row[5]), float(row[6]))
            except Exception as exc:
                raise ValueError(f"{path}: row {row_number}: {exc}") from exc
            items.append(
                JudgmentItem(observation=obs, direction=direction, agent_judgment=judged)
            )
    return items
