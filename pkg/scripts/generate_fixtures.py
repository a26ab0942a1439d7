#!/usr/bin/env python3
"""Regenerate the recorded-response fixtures under tests/fixtures/.

The fixtures stand in for live-agent transcripts so the regression suite can
verify that medians and model-fit metrics recompute bit-for-bit from recorded
data. They are produced by simulated Bayesian agents with fixed seeds; rerun
this script only when the fixture format changes, then refresh frozen.json
(which this script rewrites) and commit both.
"""

import dataclasses
import json
from pathlib import Path

import numpy as np

from iterprior.agents import AgentResponse, simulated_agent_for_task
from iterprior.bayes import (
    EmpiricalPrior,
    SparseStrongPrior,
    UniformPrior,
    fit_metrics,
    generate_judgment_items,
    predict_judgments,
    prior_grid,
    write_judgments_csv,
)
from iterprior.chains import EnsembleConfig, empirical_prior, persist, run_ensemble
from iterprior.likelihoods import CausalDirection, CausalHypothesis
from iterprior.numerics import Density1D, RandomStream
from iterprior.reports import save_density_csv
from iterprior.tasks import builtin_tasks

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SPECULATIVE = {
    # task name -> (beta a, beta b, base seed)
    "superhuman-ai": (1.5, 8.0, 2001),
    "zero-carbon": (2.5, 8.0, 2002),
    "mars-colony": (3.0, 9.0, 2003),
}


class TranscribingAgent:
    """Wraps a simulated agent so records carry model-style raw answer text.

    Year answers are rounded to whole years, matching what a live agent's
    single-value reply would contain; the rounded value becomes the recorded
    hypothesis so records and raw text stay consistent.
    """

    deterministic = True

    def __init__(self, inner):
        self.inner = inner

    def respond(self, task, observation, rng):
        response = self.inner.respond(task, observation, rng)
        value = int(round(response.hypothesis))
        return AgentResponse(hypothesis=float(value), raw_text=str(value), attempts=1)


def make_speculative_fixtures() -> dict:
    out_dir = FIXTURES / "speculative"
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = builtin_tasks()
    medians = {}
    for name, (a, b, seed) in SPECULATIVE.items():
        task = tasks[name]
        lo, hi = task.hypothesis_bounds
        agent = TranscribingAgent(
            simulated_agent_for_task(task, Density1D.from_beta(a, b, lo, hi))
        )
        config = EnsembleConfig(task=name, n_chains=100, n_iterations=12, base_seed=seed)
        ensemble = run_ensemble(config, agent)
        persist(ensemble, out_dir / f"{name}.jsonl")
        medians[name] = float(np.median(ensemble.hypotheses_at(12)))
    return medians


def make_causal_fixtures() -> dict:
    out_dir = FIXTURES / "causal"
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = builtin_tasks()
    task = tasks["causal-genes-generative"]

    prior = prior_grid(SparseStrongPrior(alpha=5.0, direction=CausalDirection.GENERATIVE))
    agent = simulated_agent_for_task(task, prior)
    config = EnsembleConfig(task=task.name, n_chains=100, n_iterations=12, base_seed=3001)
    ensemble = run_ensemble(config, agent)
    empirical = empirical_prior(ensemble)
    save_density_csv(empirical, out_dir / "empirical_prior_generative.csv")

    # judged strengths: empirical-prior predictions plus response noise,
    # quantized to counts out of 100 like live answers
    items = generate_judgment_items([CausalDirection.GENERATIVE])
    predicted = predict_judgments(empirical, items)
    noise = np.random.default_rng(3002)
    judged = []
    for item in predicted:
        w0 = np.clip(item.model_prediction[0] + noise.normal(0.0, 0.08), 0.0, 1.0)
        w1 = np.clip(item.model_prediction[1] + noise.normal(0.0, 0.08), 0.0, 1.0)
        judged.append(
            dataclasses.replace(
                item,
                agent_judgment=(round(float(w0), 2), round(float(w1), 2)),
            )
        )
    write_judgments_csv(judged, out_dir / "judgments_generative.csv")

    metrics = {}
    for label, spec in (
        ("uniform", UniformPrior()),
        ("sparse-strong", SparseStrongPrior(alpha=5.0, direction=CausalDirection.GENERATIVE)),
        ("empirical", EmpiricalPrior(grid=empirical)),
    ):
        scored = predict_judgments(prior_grid(spec), items)
        predictions = [v for item in scored for v in item.model_prediction]
        judgments = [v for item in judged for v in item.agent_judgment]
        result = fit_metrics(predictions, judgments)
        metrics[label] = {"pearson": result.pearson, "rmsd": result.rmsd}
    return metrics


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    frozen = {
        "speculative_medians": make_speculative_fixtures(),
        "generative_fit_metrics": make_causal_fixtures(),
    }
    (FIXTURES / "frozen.json").write_text(json.dumps(frozen, indent=2) + "\n")
    print(json.dumps(frozen, indent=2))


if __name__ == "__main__":
    main()
