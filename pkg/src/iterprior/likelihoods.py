"""Likelihood families p(d | h): forward samplers for chain transitions and
log-density evaluators for posterior grids.

Four families cover every builtin task: a two-group causal contingency model
(noisy-OR for generative causes, noisy-AND-NOT for preventive ones), a
ten-flip coin, and integer/continuous uniform intervals whose upper end is
the hypothesis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .errors import DegenerateHypothesisError
from .numerics import RandomStream, sample_binomial, sample_uniform_int

__all__ = [
    "CausalDirection",
    "CausalHypothesis",
    "CausalObservation",
    "ScalarObservation",
    "CoinObservation",
    "effect_probability",
    "log_binomial_pmf",
    "causal_log_likelihood",
    "causal_log_likelihood_grid",
    "sample_causal_observation",
    "UniformIntLikelihood",
    "UniformRealLikelihood",
    "CoinFlipLikelihood",
    "CausalContingencyLikelihood",
]


class CausalDirection(enum.Enum):
    GENERATIVE = "generative"
    PREVENTIVE = "preventive"

    def __str__(self) -> str:  # pragma: no cover - display sugar
        return self.value


@dataclass(frozen=True)
class CausalHypothesis:
    """Strengths of the always-present background cause (w0) and the candidate cause (w1)."""

    w0: float
    w1: float

    def __post_init__(self):
        for name, value in (("w0", self.w0), ("w1", self.w1)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class CausalObservation:
    """Effect counts among items exposed (+) and not exposed (-) to the candidate cause."""

    n_c_plus: int
    n_c_minus: int
    k_plus: int
    k_minus: int

    def __post_init__(self):
        if not 0 <= self.k_plus <= self.n_c_plus:
            raise ValueError(f"k_plus={self.k_plus} outside [0, {self.n_c_plus}]")
        if not 0 <= self.k_minus <= self.n_c_minus:
            raise ValueError(f"k_minus={self.k_minus} outside [0, {self.n_c_minus}]")


@dataclass(frozen=True)
class ScalarObservation:
    """A single probe value shown to the agent (current age, year, minutes, ...)."""

    probe: float


@dataclass(frozen=True)
class CoinObservation:
    """Heads count among a fixed number of coin flips."""

    k_heads: int
    n_flips: int = 10

    def __post_init__(self):
        if not 0 <= self.k_heads <= self.n_flips:
            raise ValueError(f"k_heads={self.k_heads} outside [0, {self.n_flips}]")


def effect_probability(
    h: CausalHypothesis, direction: CausalDirection, c_present: bool
) -> float:
    """Probability of the effect under the two-cause model.

    Generative candidate: noisy-OR, 1 - (1 - w0)(1 - w1) when present.
    Preventive candidate: noisy-AND-NOT, w0 (1 - w1) when present.
    Absent candidate leaves only the background cause in both cases.
    """
    if not c_present:
        return h.w0
    if direction is CausalDirection.GENERATIVE:
        return 1.0 - (1.0 - h.w0) * (1.0 - h.w1)
    return h.w0 * (1.0 - h.w1)


def log_binomial_pmf(k, n, p):
    """log C(n, k) p^k (1-p)^(n-k), broadcasting over ``p`` arrays.

    Degenerate rates are exact: p = 0 with k = 0 (or p = 1 with k = n)
    contributes 0, while impossible counts give -inf.
    """
    k = np.asarray(k)
    n = np.asarray(n)
    p = np.asarray(p, dtype=float)
    coef = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    return coef + xlogy(k, p) + xlog1py(n - k, -p)


def _effect_probability_arrays(w0, w1, direction: CausalDirection):
    w0 = np.asarray(w0, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    if direction is CausalDirection.GENERATIVE:
        p_present = 1.0 - (1.0 - w0) * (1.0 - w1)
    else:
        p_present = w0 * (1.0 - w1)
    return p_present, np.broadcast_to(w0, p_present.shape)


def causal_log_likelihood_grid(
    d: CausalObservation, direction: CausalDirection, w0, w1
) -> np.ndarray:
    """Log-likelihood of ``d`` over broadcastable arrays of causal strengths."""
    p_present, p_absent = _effect_probability_arrays(w0, w1, direction)
    return log_binomial_pmf(d.k_plus, d.n_c_plus, p_present) + log_binomial_pmf(
        d.k_minus, d.n_c_minus, p_absent
    )


def causal_log_likelihood(
    d: CausalObservation, h: CausalHypothesis, direction: CausalDirection
) -> float:
    """Log-likelihood of one contingency observation; -inf for impossible counts."""
    return float(causal_log_likelihood_grid(d, direction, h.w0, h.w1))


def sample_causal_observation(
    rng: RandomStream,
    h: CausalHypothesis,
    direction: CausalDirection,
    n_c_plus: int,
    n_c_minus: int,
) -> CausalObservation:
    """Draw effect counts for both groups from the causal model at ``h``."""
    if n_c_plus < 0 or n_c_minus < 0:
        raise ValueError("group sizes must be non-negative")
    p_present = effect_probability(h, direction, c_present=True)
    p_absent = effect_probability(h, direction, c_present=False)
    return CausalObservation(
        n_c_plus=n_c_plus,
        n_c_minus=n_c_minus,
        k_plus=sample_binomial(rng, n_c_plus, p_present),
        k_minus=sample_binomial(rng, n_c_minus, p_absent),
    )


# ---------------------------------------------------------------------------
# Scalar families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformIntLikelihood:
    """Integer probe uniform on {lo, ..., floor(h)}.

    ``h == lo`` keeps the single-point support {lo} rather than becoming
    empty.
    """

    lo: int = 1

    def sample(self, rng: RandomStream, h: float) -> ScalarObservation:
        if h < self.lo:
            raise DegenerateHypothesisError(f"hypothesis {h} below lower bound {self.lo}")
        return ScalarObservation(probe=float(sample_uniform_int(rng, self.lo, int(np.floor(h)))))

    def log_density(self, obs: ScalarObservation, h) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        top = np.floor(h)
        size = top - self.lo + 1
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                (obs.probe >= self.lo) & (obs.probe <= top) & (size >= 1),
                -np.log(size),
                -np.inf,
            )
        return out

    def format_probe(self, probe: float) -> str:
        return str(int(probe))

    def display(self) -> str:
        return f"U[{self.lo}, h]"


@dataclass(frozen=True)
class UniformRealLikelihood:
    """Continuous probe uniform on [lo, h]; h == lo degenerates to a point mass at lo."""

    lo: float = 0.0

    def sample(self, rng: RandomStream, h: float) -> ScalarObservation:
        if h < self.lo:
            raise DegenerateHypothesisError(f"hypothesis {h} below lower bound {self.lo}")
        if h == self.lo:
            return ScalarObservation(probe=float(self.lo))
        return ScalarObservation(probe=float(rng.generator.uniform(self.lo, h)))

    def log_density(self, obs: ScalarObservation, h) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        width = h - self.lo
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                (obs.probe >= self.lo) & (obs.probe <= h) & (width > 0),
                -np.log(width),
                -np.inf,
            )
        return out

    def format_probe(self, probe: float) -> str:
        return f"{probe:.1f}"

    def display(self) -> str:
        lo = int(self.lo) if float(self.lo).is_integer() else self.lo
        return f"U[{lo}, h]"


@dataclass(frozen=True)
class CoinFlipLikelihood:
    """Heads count from a fixed number of flips of a coin with bias h."""

    n_flips: int = 10

    def sample(self, rng: RandomStream, h: float) -> CoinObservation:
        if not 0.0 <= h <= 1.0:
            raise DegenerateHypothesisError(f"head probability {h} outside [0, 1]")
        return CoinObservation(k_heads=sample_binomial(rng, self.n_flips, h), n_flips=self.n_flips)

    def log_density(self, obs: CoinObservation, h) -> np.ndarray:
        return log_binomial_pmf(obs.k_heads, obs.n_flips, h)

    def display(self) -> str:
        return f"Bin({self.n_flips}, h)"


@dataclass(frozen=True)
class CausalContingencyLikelihood:
    """Two-group contingency counts at fixed sample sizes, noisy-OR or noisy-AND-NOT."""

    direction: CausalDirection
    n_c_plus: int = 16
    n_c_minus: int = 16

    def sample(self, rng: RandomStream, h) -> CausalObservation:
        if not isinstance(h, CausalHypothesis):
            h = CausalHypothesis(*h)
        return sample_causal_observation(rng, h, self.direction, self.n_c_plus, self.n_c_minus)

    def log_density_grid(self, obs: CausalObservation, w0, w1) -> np.ndarray:
        return causal_log_likelihood_grid(obs, self.direction, w0, w1)

    def display(self) -> str:
        name = "noisy-OR" if self.direction is CausalDirection.GENERATIVE else "noisy-AND-NOT"
        return f"{name}, N={self.n_c_plus}+{self.n_c_minus}"


ScalarLikelihood = UniformIntLikelihood | UniformRealLikelihood | CoinFlipLikelihood
Likelihood = ScalarLikelihood | CausalContingencyLikelihood
