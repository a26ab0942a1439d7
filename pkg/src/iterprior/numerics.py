"""Seeded randomness, discretized densities, kernel density estimation, and
the rank/correlation statistics used throughout the package.

Everything here is deterministic given a :class:`RandomStream`: two streams
built from the same seed produce identical draw sequences, and forked child
streams depend only on (parent seed, fork key), never on draw order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import betainc, erfc

__all__ = [
    "RandomStream",
    "Density1D",
    "DensityGrid2D",
    "GRID_POINTS",
    "GRID_AXIS",
    "sample_uniform_int",
    "sample_binomial",
    "MannWhitneyResult",
    "mann_whitney_u",
    "pearson_r",
    "rmsd",
    "kde_density_1d",
    "kde_density_2d",
]

# Causal-strength grids are fixed at 101 points per axis, 0.00 to 1.00.
GRID_POINTS = 101
GRID_AXIS = np.linspace(0.0, 1.0, GRID_POINTS)

_MASS_TOL = 1e-9


class RandomStream:
    """A seeded random generator with order-independent forking.

    Child streams are derived from ``(seed, key)`` alone, so an ensemble can
    hand stream ``fork(i)`` to chain ``i`` and obtain identical results no
    matter how chains are scheduled.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.generator = np.random.default_rng(self.seed)

    def fork(self, key: int) -> "RandomStream":
        """Derive an independent child stream from this stream's seed and ``key``."""
        child_seed = np.random.SeedSequence((self.seed, int(key))).generate_state(1, dtype=np.uint64)[0]
        return RandomStream(int(child_seed))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed})"


def sample_uniform_int(rng: RandomStream, lo: int, hi: int) -> int:
    """Draw a uniform integer from the closed interval [lo, hi]."""
    if lo > hi:
        raise ValueError(f"invalid range: lo={lo} exceeds hi={hi}")
    return int(rng.generator.integers(lo, hi + 1))


def sample_binomial(rng: RandomStream, n: int, p: float) -> int:
    """Draw the number of successes in ``n`` independent trials at rate ``p``."""
    if n < 0:
        raise ValueError(f"invalid trial count: n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"invalid probability: p={p}")
    return int(rng.generator.binomial(n, p))


# ---------------------------------------------------------------------------
# Densities on discretized supports
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Density1D:
    """Probability masses on uniform bins spanning [lo, hi].

    Masses are non-negative and sum to one; hypotheses discretized on this
    density live at bin centers.
    """

    lo: float
    hi: float
    masses: np.ndarray

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "masses", masses)
        if masses.ndim != 1 or masses.size < 2:
            raise ValueError("a 1D density needs at least two bins")
        if not self.lo < self.hi:
            raise ValueError(f"invalid support: [{self.lo}, {self.hi}]")
        if (masses < 0).any():
            raise ValueError("density masses must be non-negative")
        total = masses.sum()
        if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=_MASS_TOL):
            raise ValueError(f"density masses sum to {total!r}, expected 1")

    @property
    def n_bins(self) -> int:
        return self.masses.size

    @property
    def bin_width(self) -> float:
        return (self.hi - self.lo) / self.masses.size

    @property
    def centers(self) -> np.ndarray:
        return self.lo + (np.arange(self.masses.size) + 0.5) * self.bin_width

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.masses.size + 1)

    def cumulative(self) -> np.ndarray:
        """CDF evaluated at the upper edge of each bin."""
        return np.cumsum(self.masses)

    @classmethod
    def from_weights(cls, lo: float, hi: float, weights: Sequence[float]) -> "Density1D":
        """Normalize non-negative weights into a density."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise ValueError("weights must carry positive total mass")
        return cls(lo, hi, w / total)

    @classmethod
    def uniform(cls, lo: float, hi: float, bins: int = 100) -> "Density1D":
        return cls(lo, hi, np.full(bins, 1.0 / bins))

    @classmethod
    def from_beta(cls, a: float, b: float, lo: float, hi: float, bins: int = 100) -> "Density1D":
        """Discretize a Beta(a, b) distribution rescaled onto [lo, hi].

        Bin masses are exact CDF increments rather than point evaluations of
        the pdf, so unbounded-density endpoints (a or b below 1) keep their
        full mass.
        """
        edges = np.linspace(0.0, 1.0, bins + 1)
        cdf = betainc(a, b, edges)
        return cls.from_weights(lo, hi, np.diff(cdf))


@dataclass(frozen=True, eq=False)
class DensityGrid2D:
    """Probability masses on the fixed 101x101 grid over the unit square.

    ``masses[i, j]`` is the mass at ``(w0, w1) = (GRID_AXIS[i], GRID_AXIS[j])``.
    """

    masses: np.ndarray

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "masses", masses)
        if masses.shape != (GRID_POINTS, GRID_POINTS):
            raise ValueError(f"grid must be {GRID_POINTS}x{GRID_POINTS}, got {masses.shape}")
        if (masses < 0).any():
            raise ValueError("density masses must be non-negative")
        total = masses.sum()
        if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=_MASS_TOL):
            raise ValueError(f"density masses sum to {total!r}, expected 1")

    @classmethod
    def from_weights(cls, weights: np.ndarray) -> "DensityGrid2D":
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise ValueError("weights must carry positive total mass")
        return cls(w / total)

    @classmethod
    def uniform(cls) -> "DensityGrid2D":
        n = GRID_POINTS * GRID_POINTS
        return cls(np.full((GRID_POINTS, GRID_POINTS), 1.0 / n))

    def marginal_w0(self) -> np.ndarray:
        return self.masses.sum(axis=1)

    def marginal_w1(self) -> np.ndarray:
        return self.masses.sum(axis=0)

    def mean(self) -> tuple[float, float]:
        """Mass-weighted means of the two coordinates."""
        return (
            float(self.marginal_w0() @ GRID_AXIS),
            float(self.marginal_w1() @ GRID_AXIS),
        )


# ---------------------------------------------------------------------------
# Rank and correlation statistics
# ---------------------------------------------------------------------------


class MannWhitneyResult(NamedTuple):
    u: float
    p_value: float


def _average_ranks(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Midranks of ``values`` plus the tie-group sizes."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=float)
    sorted_vals = values[order]
    # group boundaries of runs of equal values
    boundaries = np.flatnonzero(np.diff(sorted_vals) != 0) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [values.size]))
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = 0.5 * (s + e + 1)
    return ranks, ends - starts


@lru_cache(maxsize=None)
def _u_tail_counts(n1: int, n2: int) -> tuple[int, ...]:
    """Number of label assignments giving each value of the U statistic.

    Standard recurrence f(n1, n2, u) = f(n1-1, n2, u-n2) + f(n1, n2-1, u),
    valid when the pooled values are distinct. Exact integer arithmetic.
    """

    @lru_cache(maxsize=None)
    def f(a: int, b: int, u: int) -> int:
        if u < 0:
            return 0
        if a == 0 or b == 0:
            return 1 if u == 0 else 0
        return f(a - 1, b, u - b) + f(a, b - 1, u)

    counts = tuple(f(n1, n2, u) for u in range(n1 * n2 + 1))
    f.cache_clear()
    return counts

# Exact null distribution is used below this per-group size (no ties only);
# beyond it the normal approximation with tie and continuity corrections is
# accurate at the ensemble sizes this package tests (around 100 chains).
_EXACT_MAX_GROUP = 10


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> MannWhitneyResult:
    """Two-sided Mann-Whitney U test.

    Returns the rank-sum statistic for sample ``a`` and a two-sided p-value.
    Small untied samples use the exact null distribution of U; larger or tied
    samples use the normal approximation with tie and continuity corrections.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    n1, n2 = a.size, b.size
    pooled = np.concatenate([a, b])
    ranks, tie_sizes = _average_ranks(pooled)
    u1 = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    u2 = n1 * n2 - u1
    has_ties = bool((tie_sizes > 1).any())

    if not has_ties and max(n1, n2) <= _EXACT_MAX_GROUP:
        counts = _u_tail_counts(n1, n2)
        total = sum(counts)
        u_min = int(round(min(u1, u2)))
        p = 2.0 * sum(counts[: u_min + 1]) / total
        return MannWhitneyResult(u1, min(1.0, p))

    n = n1 + n2
    mu = n1 * n2 / 2.0
    tie_term = float(((tie_sizes**3) - tie_sizes).sum())
    sigma = math.sqrt(n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1))))
    if sigma == 0.0:
        # every pooled value identical: no evidence of any difference
        return MannWhitneyResult(u1, 1.0)
    z = (max(u1, u2) - mu - 0.5) / sigma
    p = min(1.0, float(erfc(z / math.sqrt(2.0))))
    return MannWhitneyResult(u1, p)


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation coefficient, guaranteed inside [-1, 1]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1D sequences of equal length")
    if x.size < 2:
        raise ValueError("correlation needs at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation is undefined for a constant input")
    r = float(dx @ dy) / (sx * sy)
    return max(-1.0, min(1.0, r))


def rmsd(x: Sequence[float], y: Sequence[float]) -> float:
    """Root-mean-squared deviation between two equal-length sequences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1D sequences of equal length")
    if x.size == 0:
        raise ValueError("inputs must be non-empty")
    d = x - y
    return math.sqrt(float(d @ d) / x.size)


# ---------------------------------------------------------------------------
# Kernel density estimation
# ---------------------------------------------------------------------------


def _silverman_bandwidth(values: np.ndarray, dims: int) -> float:
    """Rule-of-thumb bandwidth from the sample standard deviation."""
    n = values.size
    sd = float(values.std())
    exponent = -1.0 / (dims + 4)
    factor = (4.0 / (dims + 2)) ** (1.0 / (dims + 4))
    return sd * factor * n**exponent


def kde_density_1d(
    samples: Sequence[float],
    lo: float,
    hi: float,
    bins: int = 100,
    bandwidth: float | str = "auto",
) -> Density1D:
    """Gaussian-kernel density of ``samples`` on ``bins`` uniform bins of [lo, hi].

    Mass falling outside the support is renormalized onto it. The automatic
    bandwidth is Silverman's rule clamped to at least one bin width, so a
    degenerate sample still yields a usable density.
    """
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise ValueError("samples must be non-empty")
    width = (hi - lo) / bins
    if bandwidth == "auto":
        h = max(_silverman_bandwidth(s, dims=1), width)
    else:
        h = float(bandwidth)
        if not h > 0:
            raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    centers = lo + (np.arange(bins) + 0.5) * width
    z = (centers[:, None] - s[None, :]) / h
    weights = np.exp(-0.5 * z * z).sum(axis=1)
    return Density1D.from_weights(lo, hi, weights)


def kde_density_2d(
    samples: Sequence[Sequence[float]],
    bandwidth: float | str = "auto",
) -> DensityGrid2D:
    """Product-Gaussian-kernel density of (w0, w1) pairs on the 101x101 grid."""
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise ValueError("samples must be non-empty")
    if s.ndim != 2 or s.shape[1] != 2:
        raise ValueError("2D samples must have shape (n, 2)")
    step = GRID_AXIS[1] - GRID_AXIS[0]
    if bandwidth == "auto":
        h0 = max(_silverman_bandwidth(s[:, 0], dims=2), step)
        h1 = max(_silverman_bandwidth(s[:, 1], dims=2), step)
    else:
        h0 = h1 = float(bandwidth)
        if not h0 > 0:
            raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    z0 = (GRID_AXIS[:, None] - s[None, :, 0]) / h0
    z1 = (GRID_AXIS[:, None] - s[None, :, 1]) / h1
    k0 = np.exp(-0.5 * z0 * z0)
    k1 = np.exp(-0.5 * z1 * z1)
    return DensityGrid2D.from_weights(k0 @ k1.T)
