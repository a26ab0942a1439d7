"""Agents that map an observation to a sampled hypothesis.

Two implementations of the same contract: an exact simulated Bayesian agent
(samples its discretized posterior; serves as the convergence oracle) and a
remote LLM agent speaking the chat-completions wire format.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from .errors import (
    AgentFailure,
    BoundsError,
    DegeneratePosteriorError,
    LlmError,
    MissingCredentialError,
    ParseError,
)
from .likelihoods import (
    CausalContingencyLikelihood,
    CausalHypothesis,
    CausalObservation,
    CausalDirection,
)
from .numerics import GRID_AXIS, GRID_POINTS, Density1D, DensityGrid2D, RandomStream
from .tasks import HypothesisKind, Observation, ResponseSchema, TaskSpec, render_prompt

__all__ = [
    "AgentResponse",
    "posterior_sample_grid",
    "SimulatedScalarAgent",
    "SimulatedCausalAgent",
    "simulated_agent_for_task",
    "parse_numeric_response",
    "LlmAgentSpec",
    "LlmClient",
    "LlmAgent",
]


@dataclass(frozen=True)
class AgentResponse:
    """One sampled hypothesis plus the raw text and call count behind it."""

    hypothesis: float | CausalHypothesis
    raw_text: str | None = None
    attempts: int = 1


def posterior_sample_grid(rng: RandomStream, prior, loglik) -> int:
    """Sample a flat cell index with probability proportional to prior * exp(loglik).

    Log-likelihoods are shifted by their maximum before exponentiation for
    numerical stability. Raises :class:`DegeneratePosteriorError` when no
    cell carries positive posterior mass.
    """
    prior = np.asarray(prior, dtype=float).ravel()
    loglik = np.asarray(loglik, dtype=float).ravel()
    if prior.shape != loglik.shape:
        raise ValueError("prior and log-likelihood shapes must match")
    shift = loglik.max()
    if not np.isfinite(shift):
        raise DegeneratePosteriorError("log-likelihood is -inf everywhere")
    weights = prior * np.exp(loglik - shift)
    total = weights.sum()
    if not total > 0.0 or not np.isfinite(total):
        raise DegeneratePosteriorError("posterior carries no mass anywhere on the grid")
    cuts = np.cumsum(weights)
    u = rng.generator.random() * total
    idx = int(np.searchsorted(cuts, u, side="right"))
    return min(idx, weights.size - 1)


class SimulatedScalarAgent:
    """Exact Bayesian agent over a discretized scalar hypothesis space.

    Hypotheses live at the bin centers of the prior; each call samples the
    posterior prior(h) * p(d | h) computed exactly on those centers.
    """

    deterministic = True

    def __init__(self, prior: Density1D, likelihood):
        self.prior = prior
        self.likelihood = likelihood

    def posterior_masses(self, d: Observation) -> np.ndarray:
        """Normalized posterior over bin centers given ``d`` (exposed for tests)."""
        loglik = self.likelihood.log_density(d, self.prior.centers)
        shift = loglik.max()
        if not np.isfinite(shift):
            raise DegeneratePosteriorError("no hypothesis bin supports this observation")
        weights = self.prior.masses * np.exp(loglik - shift)
        total = weights.sum()
        if not total > 0.0:
            raise DegeneratePosteriorError("posterior carries no mass anywhere on the grid")
        return weights / total

    def respond(self, task: TaskSpec, d: Observation, rng: RandomStream) -> AgentResponse:
        loglik = self.likelihood.log_density(d, self.prior.centers)
        idx = posterior_sample_grid(rng, self.prior.masses, loglik)
        return AgentResponse(hypothesis=float(self.prior.centers[idx]))


class SimulatedCausalAgent:
    """Exact Bayesian agent over the 101x101 causal-strength grid."""

    deterministic = True

    def __init__(self, prior: DensityGrid2D, direction: CausalDirection):
        self.prior = prior
        self.direction = direction
        self._w0_mesh, self._w1_mesh = np.meshgrid(GRID_AXIS, GRID_AXIS, indexing="ij")
        # (key, cumsum) memo of the last observation's posterior, stored as a
        # single tuple so concurrent chains can only ever recompute, not mix
        self._cache: tuple[tuple, np.ndarray] | None = None

    def _loglik(self, d: CausalObservation) -> np.ndarray:
        from .likelihoods import causal_log_likelihood_grid

        return causal_log_likelihood_grid(d, self.direction, self._w0_mesh, self._w1_mesh)

    def posterior_masses(self, d: CausalObservation) -> np.ndarray:
        loglik = self._loglik(d)
        shift = loglik.max()
        if not np.isfinite(shift):
            raise DegeneratePosteriorError("no grid cell supports this observation")
        weights = self.prior.masses * np.exp(loglik - shift)
        total = weights.sum()
        if not total > 0.0:
            raise DegeneratePosteriorError("posterior carries no mass anywhere on the grid")
        return weights / total

    def respond(self, task: TaskSpec, d: CausalObservation, rng: RandomStream) -> AgentResponse:
        key = (d.n_c_plus, d.n_c_minus, d.k_plus, d.k_minus)
        cached = self._cache
        if cached is not None and cached[0] == key:
            cuts = cached[1]
        else:
            cuts = np.cumsum(self.posterior_masses(d).ravel())
            self._cache = (key, cuts)
        u = rng.generator.random() * cuts[-1]
        idx = min(int(np.searchsorted(cuts, u, side="right")), cuts.size - 1)
        i, j = divmod(idx, GRID_POINTS)
        return AgentResponse(hypothesis=CausalHypothesis(float(GRID_AXIS[i]), float(GRID_AXIS[j])))


def simulated_agent_for_task(task: TaskSpec, prior: Density1D | DensityGrid2D | None = None):
    """Build the simulated Bayesian agent matching a task's likelihood binding.

    With no explicit prior the agent is uniform over the task's bounds
    (100 bins for scalar kinds, the full grid for causal ones).
    """
    if task.kind is HypothesisKind.CAUSAL_PAIR:
        likelihood = task.likelihood
        assert isinstance(likelihood, CausalContingencyLikelihood)
        if prior is None:
            prior = DensityGrid2D.uniform()
        if not isinstance(prior, DensityGrid2D):
            raise ValueError("a causal task needs a DensityGrid2D prior")
        return SimulatedCausalAgent(prior, likelihood.direction)
    lo, hi = task.hypothesis_bounds
    if prior is None:
        prior = Density1D.uniform(lo, hi)
    if not isinstance(prior, Density1D):
        raise ValueError("a scalar task needs a Density1D prior")
    if not (np.isclose(prior.lo, lo) and np.isclose(prior.hi, hi)):
        raise ValueError(
            f"prior support [{prior.lo}, {prior.hi}] does not match task bounds [{lo}, {hi}]"
        )
    return SimulatedScalarAgent(prior, task.likelihood)


# ---------------------------------------------------------------------------
# Response parsing
# ---------------------------------------------------------------------------

_NUMBER = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?"
_NUMBER_RE = re.compile(_NUMBER)
_STRICT_ONE = re.compile(rf"\s*({_NUMBER})\s*\.?\s*$")
_STRICT_TWO = re.compile(rf"\s*\(?\s*({_NUMBER})\s*[,;]\s*({_NUMBER})\s*\)?\s*\.?\s*$")


def parse_numeric_response(
    text: str, schema: ResponseSchema, bounds: tuple[float, float]
):
    """Extract the numeric answer(s) from a model response.

    A strict pass accepts only text that is exactly the expected shape; a
    lenient pass then takes the first number(s) in reading order. Raw values
    are range-checked against ``bounds``. The two-number schema reads a pair
    of out-of-100 counts and returns them rescaled to strengths in [0, 1].

    Returns a float for the one-number schema and a (w0, w1) tuple for the
    two-number schema. Raises :class:`ParseError` when no number of the
    expected shape exists and :class:`BoundsError` on out-of-range values.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected text, got {type(text).__name__}")
    lo, hi = bounds

    def check(value: float) -> float:
        if not lo <= value <= hi:
            raise BoundsError(f"value {value} outside [{lo}, {hi}] in response {text!r}")
        return value

    if schema is ResponseSchema.ONE_NUMBER:
        match = _STRICT_ONE.match(text)
        if match:
            return check(float(match.group(1)))
        found = _NUMBER_RE.findall(text)
        if not found:
            raise ParseError(f"no number found in response {text!r}")
        return check(float(found[0]))

    match = _STRICT_TWO.match(text)
    if match:
        first, second = (float(match.group(1)), float(match.group(2)))
    else:
        found = _NUMBER_RE.findall(text)
        if len(found) < 2:
            raise ParseError(f"expected two numbers in response {text!r}")
        first, second = float(found[0]), float(found[1])
    return (check(first) / 100.0, check(second) / 100.0)


# ---------------------------------------------------------------------------
# LLM agent
# ---------------------------------------------------------------------------


@dataclass
class LlmAgentSpec:
    """Connection and sampling settings for a chat-completions endpoint."""

    endpoint: str
    model: str
    temperature: float = 1.0
    timeout: float = 60.0
    max_retries: int = 5
    max_concurrent: int = 4
    credential_env: str = "ITERPRIOR_API_KEY"
    backoff_base: float = 1.0
    capture_dir: str | Path | None = None

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.max_retries < 0:
            raise ValueError("max retries must be non-negative")


class LlmClient:
    """Minimal chat-completions client with retry/backoff and a concurrency cap."""

    def __init__(self, spec: LlmAgentSpec):
        self.spec = spec
        api_key = os.environ.get(spec.credential_env)
        if not api_key:
            raise MissingCredentialError(
                f"environment variable {spec.credential_env} is not set; "
                "export the API credential before running a live agent"
            )
        self._session = requests.Session()
        self._session.headers["Authorization"] = f"Bearer {api_key}"
        self._session.headers["Content-Type"] = "application/json"
        self._limiter = threading.Semaphore(max(1, spec.max_concurrent))
        self._capture_lock = threading.Lock()
        if spec.capture_dir is not None:
            Path(spec.capture_dir).mkdir(parents=True, exist_ok=True)

    def _capture(self, payload: dict, response_body: str) -> None:
        if self.spec.capture_dir is None:
            return
        path = Path(self.spec.capture_dir) / "llm_calls.jsonl"
        line = json.dumps({"request": payload, "response": response_body}, ensure_ascii=False)
        with self._capture_lock:
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def complete(self, messages: list[dict[str, str]]) -> str:
        """One chat completion; retries transport errors, rate limits, and 5xx."""
        payload = {
            "model": self.spec.model,
            "messages": messages,
            "temperature": self.spec.temperature,
        }
        last_error: LlmError | None = None
        for attempt in range(self.spec.max_retries + 1):
            if attempt > 0:
                time.sleep(self.spec.backoff_base * 2 ** (attempt - 1))
            try:
                with self._limiter:
                    http = self._session.post(
                        self.spec.endpoint, json=payload, timeout=self.spec.timeout
                    )
            except requests.RequestException as exc:
                last_error = LlmError(f"transport failure: {exc}")
                continue
            if http.status_code == 429 or http.status_code >= 500:
                last_error = LlmError(
                    f"retryable status {http.status_code}: {http.text[:200]}",
                    status_code=http.status_code,
                    body=http.text,
                )
                continue
            if http.status_code >= 400:
                raise LlmError(
                    f"request rejected with status {http.status_code}: {http.text[:200]}",
                    status_code=http.status_code,
                    body=http.text,
                )
            try:
                body = http.json()
                content = body["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise LlmError(
                    f"malformed completion body: {exc}", status_code=http.status_code,
                    body=http.text,
                ) from exc
            self._capture(payload, http.text)
            return content
        raise LlmError(
            f"exhausted {self.spec.max_retries + 1} attempts: {last_error}",
            status_code=last_error.status_code if last_error else None,
            body=last_error.body if last_error else None,
        )


class LlmAgent:
    """Agent backed by a remote model; parses and range-checks every answer.

    Parse and bounds failures trigger a fresh completion, up to the spec's
    retry budget per question; the step then fails rather than fabricating
    a hypothesis.
    """

    deterministic = False

    def __init__(self, spec: LlmAgentSpec, client: LlmClient | None = None):
        self.spec = spec
        self.client = client if client is not None else LlmClient(spec)

    def _ask(self, conversation: list[dict[str, str]], schema, bounds):
        last_text: str | None = None
        attempts = 0
        for _ in range(self.spec.max_retries + 1):
            attempts += 1
            last_text = self.client.complete(conversation)
            try:
                return parse_numeric_response(last_text, schema, bounds), last_text, attempts
            except (ParseError, BoundsError):
                continue
        raise AgentFailure(
            f"no usable answer after {attempts} attempts",
            raw_text=last_text,
            attempts=attempts,
        )

    def respond(self, task: TaskSpec, d: Observation, rng: RandomStream) -> AgentResponse:
        conversations = render_prompt(task, d)
        bounds = task.raw_response_bounds
        raw_values: list[float] = []
        raw_texts: list[str] = []
        total_attempts = 0
        for conversation in conversations:
            parsed, text, attempts = self._ask(conversation, task.response_schema, bounds)
            total_attempts += attempts
            raw_texts.append(text)
            if isinstance(parsed, tuple):
                raw_values.extend(parsed)
            else:
                raw_values.append(parsed)
        hypothesis = task.hypothesis_from_raw(tuple(raw_values))
        return AgentResponse(
            hypothesis=hypothesis,
            raw_text="\n".join(raw_texts),
            attempts=total_attempts,
        )
