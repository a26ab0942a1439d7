"""Run iterated in-context learning ensembles, test their convergence, and
turn stationary samples into empirical priors.

Each chain alternates agent inference h_t ~ p(h | d_{t-1}) with data
generation d_t ~ p(d | h_t). With an exact Bayesian agent this is a Gibbs
sampler whose hypothesis marginal converges to the agent's prior; ensembles
of chains therefore yield samples from that prior once stationary.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .errors import AgentFailure, DegeneratePosteriorError, EmptyEnsembleError, RecordsLoadError
from .likelihoods import CausalHypothesis, CausalObservation, CoinObservation, ScalarObservation
from .numerics import (
    Density1D,
    DensityGrid2D,
    RandomStream,
    kde_density_1d,
    kde_density_2d,
    mann_whitney_u,
)
from .tasks import HypothesisKind, Observation, TaskSpec, initial_observation, sample_observation

__all__ = [
    "ChainRecord",
    "ChainResult",
    "ChainSet",
    "EnsembleConfig",
    "ConvergenceReport",
    "run_chain",
    "run_ensemble",
    "detect_convergence",
    "empirical_prior",
    "persist",
    "load",
]

RECORDS_FORMAT = 1

# Mann-Whitney power is poor below this many chains; reports carry a warning.
MIN_CHAINS_FOR_CONVERGENCE = 20


@dataclass(frozen=True)
class ChainRecord:
    """One step of one chain.

    Iteration 0 holds the seed observation and no hypothesis; at t >= 1 the
    record holds the hypothesis inferred from the previous observation and
    the observation generated from that hypothesis. Timestamps are only
    recorded for non-deterministic (live) agents so that seeded simulated
    runs persist byte-identically.
    """

    chain_id: int
    iteration: int
    observation: Observation
    hypothesis: float | CausalHypothesis | None
    raw_text: str | None = None
    stream_seed: int = 0
    timestamp: str | None = None


@dataclass(frozen=True)
class ChainResult:
    """All records of one chain plus its failure status."""

    chain_id: int
    records: tuple[ChainRecord, ...]
    failed: bool = False
    error: str | None = None

    def hypothesis_at(self, iteration: int):
        return self.records[iteration].hypothesis


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble shape: how many chains, how long, and the base seed."""

    task: str
    n_chains: int = 100
    n_iterations: int = 12
    base_seed: int = 0

    def __post_init__(self):
        if self.n_chains < 1:
            raise ValueError("n_chains must be at least 1")
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be at least 1")


@dataclass(frozen=True)
class ChainSet:
    """An ensemble's records plus enough task metadata to analyze them standalone."""

    task_name: str
    hypothesis_kind: HypothesisKind
    hypothesis_bounds: tuple[float, float]
    n_iterations: int
    base_seed: int
    chains: tuple[ChainResult, ...]

    @property
    def n_chains(self) -> int:
        return len(self.chains)

    @property
    def surviving(self) -> tuple[ChainResult, ...]:
        return tuple(c for c in self.chains if not c.failed)

    @property
    def n_failed(self) -> int:
        return sum(1 for c in self.chains if c.failed)

    def hypotheses_at(self, iteration: int) -> np.ndarray:
        """Cross-chain hypotheses of surviving chains at one iteration.

        Returns shape (n,) for scalar kinds and (n, 2) for causal pairs.
        """
        if iteration < 1:
            raise ValueError("iteration 0 holds only the seed observation")
        values = []
        for chain in self.surviving:
            h = chain.records[iteration].hypothesis
            if isinstance(h, CausalHypothesis):
                values.append((h.w0, h.w1))
            else:
                values.append(h)
        if not values:
            raise EmptyEnsembleError("every chain in the ensemble failed")
        return np.asarray(values, dtype=float)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-iteration p-values against the final iteration plus the verdict."""

    p_values: dict[int, float]
    first_converged_iteration: int | None
    alpha: float
    n_chains_used: int
    n_failed: int
    low_power: bool

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "p_values": {str(k): v for k, v in self.p_values.items()},
            "first_converged_iteration": self.first_converged_iteration,
            "n_chains_used": self.n_chains_used,
            "n_failed": self.n_failed,
            "low_power": self.low_power,
        }


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def run_chain(
    rng: RandomStream,
    spec: TaskSpec,
    agent,
    n_iter: int,
    chain_id: int = 0,
) -> ChainResult:
    """Run one chain for ``n_iter`` iterations.

    An agent failure (or a seed observation no hypothesis can explain)
    truncates the chain; the partial records are preserved and the result is
    marked failed.
    """
    stamp = None if getattr(agent, "deterministic", False) else _now
    seed_obs = initial_observation(rng, spec, chain_index=chain_id)
    records = [
        ChainRecord(
            chain_id=chain_id,
            iteration=0,
            observation=seed_obs,
            hypothesis=None,
            stream_seed=rng.seed,
            timestamp=stamp() if stamp else None,
        )
    ]
    observation = seed_obs
    for t in range(1, n_iter + 1):
        try:
            response = agent.respond(spec, observation, rng)
        except (AgentFailure, DegeneratePosteriorError) as exc:
            return ChainResult(
                chain_id=chain_id,
                records=tuple(records),
                failed=True,
                error=f"iteration {t}: {exc}",
            )
        observation = sample_observation(rng, spec, response.hypothesis)
        records.append(
            ChainRecord(
                chain_id=chain_id,
                iteration=t,
                observation=observation,
                hypothesis=response.hypothesis,
                raw_text=response.raw_text,
                stream_seed=rng.seed,
                timestamp=stamp() if stamp else None,
            )
        )
    return ChainResult(chain_id=chain_id, records=tuple(records))


def run_ensemble(
    config: EnsembleConfig,
    agent,
    *,
    tasks: dict[str, TaskSpec] | None = None,
    parallel: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> ChainSet:
    """Run ``config.n_chains`` independent chains with per-chain forked streams.

    Chains may execute concurrently up to ``parallel`` workers; results are
    ordered by chain id and are identical under any schedule because each
    chain's stream depends only on (base seed, chain id). Individual chain
    failures are recorded; the ensemble raises only when every chain fails.
    """
    if tasks is None:
        from .tasks import builtin_tasks

        tasks = builtin_tasks()
    spec = tasks.get(config.task)
    if spec is None:
        raise KeyError(f"unknown task {config.task!r}")

    base = RandomStream(config.base_seed)
    streams = [base.fork(i) for i in range(config.n_chains)]

    def one(i: int) -> ChainResult:
        result = run_chain(streams[i], spec, agent, config.n_iterations, chain_id=i)
        if progress is not None:
            progress(i, config.n_chains)
        return result

    if parallel > 1 and config.n_chains > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(one, range(config.n_chains)))
    else:
        results = [one(i) for i in range(config.n_chains)]

    results.sort(key=lambda r: r.chain_id)
    chain_set = ChainSet(
        task_name=spec.name,
        hypothesis_kind=spec.kind,
        hypothesis_bounds=spec.hypothesis_bounds,
        n_iterations=config.n_iterations,
        base_seed=config.base_seed,
        chains=tuple(results),
    )
    if chain_set.n_failed == chain_set.n_chains:
        raise EmptyEnsembleError(
            f"all {chain_set.n_chains} chains failed; first error: {results[0].error}"
        )
    return chain_set


def detect_convergence(chains: ChainSet, alpha: float = 0.05) -> ConvergenceReport:
    """Locate the iteration from which hypothesis populations are stationary.

    Each iteration t below the final one is compared against the final
    iteration with a two-sided Mann-Whitney U test across chains; 2D
    hypotheses are tested per coordinate and combined with a Bonferroni
    factor of two. The first converged iteration is the smallest t whose
    test and all later tests fail to reject at ``alpha``.
    """
    final = chains.n_iterations
    if final < 2:
        raise ValueError("convergence detection needs at least two iterations")
    reference = chains.hypotheses_at(final)
    n_used = len(chains.surviving)
    p_values: dict[int, float] = {}
    for t in range(1, final):
        population = chains.hypotheses_at(t)
        if reference.ndim == 2:
            p0 = mann_whitney_u(population[:, 0], reference[:, 0]).p_value
            p1 = mann_whitney_u(population[:, 1], reference[:, 1]).p_value
            p = min(1.0, 2.0 * min(p0, p1))
        else:
            p = mann_whitney_u(population, reference).p_value
        p_values[t] = p

    first: int | None = None
    for t in range(final - 1, 0, -1):
        if p_values[t] > alpha:
            first = t
        else:
            break
    return ConvergenceReport(
        p_values=p_values,
        first_converged_iteration=first,
        alpha=alpha,
        n_chains_used=n_used,
        n_failed=chains.n_failed,
        low_power=n_used < MIN_CHAINS_FOR_CONVERGENCE,
    )


def empirical_prior(
    chains: ChainSet,
    at_iteration: int | None = None,
    bandwidth: float | str = "auto",
) -> Density1D | DensityGrid2D:
    """Kernel-smoothed density of cross-chain hypotheses at one iteration.

    Defaults to the final iteration. Scalar tasks yield a
    :class:`Density1D` on the task bounds; causal tasks yield a
    :class:`DensityGrid2D` on the unit square.
    """
    iteration = chains.n_iterations if at_iteration is None else at_iteration
    values = chains.hypotheses_at(iteration)
    if values.ndim == 2:
        return kde_density_2d(values, bandwidth=bandwidth)
    lo, hi = chains.hypothesis_bounds
    return kde_density_1d(values, lo, hi, bandwidth=bandwidth)


# ---------------------------------------------------------------------------
# Persistence: one self-describing JSON object per line
# ---------------------------------------------------------------------------


def _observation_to_json(obs: Observation) -> dict:
    if isinstance(obs, CausalObservation):
        return {
            "n_c_plus": obs.n_c_plus,
            "n_c_minus": obs.n_c_minus,
            "k_plus": obs.k_plus,
            "k_minus": obs.k_minus,
        }
    if isinstance(obs, CoinObservation):
        return {"k_heads": obs.k_heads, "n_flips": obs.n_flips}
    return {"probe": obs.probe}


def _observation_from_json(data: dict) -> Observation:
    if "k_plus" in data:
        return CausalObservation(**data)
    if "k_heads" in data:
        return CoinObservation(**data)
    return ScalarObservation(**data)


def _hypothesis_to_json(h):
    if h is None:
        return None
    if isinstance(h, CausalHypothesis):
        return [h.w0, h.w1]
    return h


def _hypothesis_from_json(value):
    if value is None:
        return None
    if isinstance(value, list):
        return CausalHypothesis(*value)
    return value


def persist(chains: ChainSet, path: str | Path) -> None:
    """Write an ensemble as line-oriented JSON: a header, then one record per line."""
    path = Path(path)
    lines = [
        json.dumps(
            {
                "kind": "header",
                "format": RECORDS_FORMAT,
                "task": chains.task_name,
                "hypothesis_kind": chains.hypothesis_kind.value,
                "hypothesis_bounds": list(chains.hypothesis_bounds),
                "n_iterations": chains.n_iterations,
                "base_seed": chains.base_seed,
                "n_chains": chains.n_chains,
            },
            ensure_ascii=False,
        )
    ]
    for chain in chains.chains:
        for rec in chain.records:
            entry = {
                "kind": "record",
                "chain": rec.chain_id,
                "iteration": rec.iteration,
                "observation": _observation_to_json(rec.observation),
                "hypothesis": _hypothesis_to_json(rec.hypothesis),
                "seed": rec.stream_seed,
            }
            if rec.raw_text is not None:
                entry["raw_text"] = rec.raw_text
            if rec.timestamp is not None:
                entry["timestamp"] = rec.timestamp
            lines.append(json.dumps(entry, ensure_ascii=False))
        if chain.failed:
            lines.append(
                json.dumps(
                    {"kind": "chain-failed", "chain": chain.chain_id, "error": chain.error},
                    ensure_ascii=False,
                )
            )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load(path: str | Path) -> ChainSet:
    """Read an ensemble persisted by :func:`persist`; inverse field-for-field."""
    path = Path(path)
    header: dict | None = None
    records: dict[int, list[ChainRecord]] = {}
    failures: dict[int, str | None] = {}
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
                kind = entry["kind"]
                if kind == "header":
                    header = entry
                elif kind == "record":
                    rec = ChainRecord(
                        chain_id=entry["chain"],
                        iteration=entry["iteration"],
                        observation=_observation_from_json(entry["observation"]),
                        hypothesis=_hypothesis_from_json(entry["hypothesis"]),
                        raw_text=entry.get("raw_text"),
                        stream_seed=entry["seed"],
                        timestamp=entry.get("timestamp"),
                    )
                    records.setdefault(rec.chain_id, []).append(rec)
                elif kind == "chain-failed":
                    failures[entry["chain"]] = entry.get("error")
                else:
                    raise ValueError(f"unknown entry kind {kind!r}")
            except RecordsLoadError:
                raise
            except Exception as exc:
                raise RecordsLoadError(
                    f"{path}: line {line_number}: {exc}", line_number=line_number
                ) from exc
    if header is None:
        raise RecordsLoadError(f"{path}: missing header line", line_number=1)
    chains = tuple(
        ChainResult(
            chain_id=cid,
            records=tuple(sorted(records[cid], key=lambda r: r.iteration)),
            failed=cid in failures,
            error=failures.get(cid),
        )
        for cid in sorted(records)
    )
    return ChainSet(
        task_name=header["task"],
        hypothesis_kind=HypothesisKind(header["hypothesis_kind"]),
        hypothesis_bounds=tuple(header["hypothesis_bounds"]),
        n_iterations=header["n_iterations"],
        base_seed=header["base_seed"],
        chains=chains,
    )
