"""Command-line surface: run ensembles, extract priors, and fit causal models.

Exit codes are a stable scripting contract: 0 on success, 1 on runtime
failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
import threading
from pathlib import Path

import numpy as np

from . import __version__, bayes, chains as chains_mod, reports
from .agents import LlmAgent, LlmAgentSpec, simulated_agent_for_task
from .errors import IterPriorError
from .likelihoods import CausalDirection
from .numerics import Density1D, DensityGrid2D
from .tasks import HypothesisKind, TaskSpec, builtin_tasks, load_task_config

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _load_tasks(config_path: str | None) -> dict[str, TaskSpec]:
    tasks = builtin_tasks()
    if config_path:
        tasks.update(load_task_config(config_path))
    return tasks


def _resolve_task(tasks: dict[str, TaskSpec], name: str) -> TaskSpec:
    spec = tasks.get(name)
    if spec is None:
        known = ", ".join(tasks)
        raise UsageError(f"unknown task {name!r}; known tasks: {known}")
    return spec


class UsageError(Exception):
    pass


def _sim_prior(spec_text: str, task: TaskSpec) -> Density1D | DensityGrid2D | None:
    """Parse --sim-prior values: uniform, beta:A,B, sparse-strong[:ALPHA], empirical:PATH."""
    if spec_text == "uniform":
        return None
    lo, hi = task.hypothesis_bounds
    if spec_text.startswith("beta:"):
        try:
            a, b = (float(v) for v in spec_text[len("beta:"):].split(","))
        except ValueError:
            raise UsageError(f"cannot parse beta prior {spec_text!r}; expected beta:A,B")
        return Density1D.from_beta(a, b, lo, hi)
    if spec_text == "sparse-strong" or spec_text.startswith("sparse-strong:"):
        if task.kind is not HypothesisKind.CAUSAL_PAIR:
            raise UsageError("a sparse-strong prior only applies to causal tasks")
        alpha = 5.0
        if ":" in spec_text:
            alpha = float(spec_text.split(":", 1)[1])
        direction = task.likelihood.direction
        return bayes.prior_grid(bayes.SparseStrongPrior(alpha=alpha, direction=direction))
    if spec_text.startswith("empirical:"):
        density = reports.load_density_csv(spec_text[len("empirical:"):])
        return density
    raise UsageError(f"cannot parse prior {spec_text!r}")


def _default_out_dir(seed: int) -> Path:
    stamp = _dt.datetime.now().strftime("%Y%m%dT%H%M%S")
    return Path("runs") / f"{stamp}-seed{seed}"


def cmd_tasks(args: argparse.Namespace) -> int:
    tasks = _load_tasks(args.config)
    rows = [("name", "kind", "seeds", "likelihood", "bounds")]
    for spec in tasks.values():
        lo, hi = spec.hypothesis_bounds
        fmt = lambda v: str(int(v)) if float(v).is_integer() else str(v)
        rows.append(
            (
                spec.name,
                spec.kind.value,
                spec.describe_seeds(),
                spec.describe_likelihood(),
                f"[{fmt(lo)}, {fmt(hi)}]",
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    for i, row in enumerate(rows):
        print("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip())
        if i == 0:
            print("  ".join("-" * w for w in widths))
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    tasks = _load_tasks(args.config)
    spec = _resolve_task(tasks, args.task)

    if args.agent == "sim":
        prior = _sim_prior(args.sim_prior, spec)
        agent = simulated_agent_for_task(spec, prior)
        agent_info = {"type": "sim", "prior": args.sim_prior}
    else:
        if not args.endpoint or not args.model:
            raise UsageError("--endpoint and --model are required with --agent llm")
        out_dir_known = Path(args.out) if args.out else _default_out_dir(args.seed)
        llm_spec = LlmAgentSpec(
            endpoint=args.endpoint,
            model=args.model,
            temperature=args.temperature,
            timeout=args.timeout,
            max_retries=args.retries,
            max_concurrent=args.concurrency,
            credential_env=args.credential_env,
            capture_dir=out_dir_known if args.capture else None,
        )
        agent = LlmAgent(llm_spec)
        agent_info = {
            "type": "llm",
            "endpoint": args.endpoint,
            "model": args.model,
            "temperature": args.temperature,
        }

    out_dir = Path(args.out) if args.out else _default_out_dir(args.seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "records.jsonl"
    report_path = out_dir / "convergence.json"
    manifest_path = out_dir / "manifest.json"

    manifest = {
        "tool_version": __version__,
        "task": spec.name,
        "agent": agent_info,
        "n_chains": args.chains,
        "n_iterations": args.iters,
        "base_seed": args.seed,
        "parallel": args.parallel,
        "artifacts": {
            "records": records_path.name,
            "convergence_report": report_path.name,
        },
        "started_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "finished_at": None,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    lock = threading.Lock()
    done = [0]
    show_progress = sys.stderr.isatty()

    def progress(_i: int, total: int) -> None:
        if not show_progress:
            return
        with lock:
            done[0] += 1
            print(f"\r{spec.name}: {done[0]}/{total} chains", end="", file=sys.stderr)

    config = chains_mod.EnsembleConfig(
        task=spec.name,
        n_chains=args.chains,
        n_iterations=args.iters,
        base_seed=args.seed,
    )
    ensemble = chains_mod.run_ensemble(
        config, agent, tasks=tasks, parallel=args.parallel, progress=progress
    )
    if show_progress:
        print(file=sys.stderr)

    chains_mod.persist(ensemble, records_path)
    report = chains_mod.detect_convergence(ensemble, alpha=args.alpha)
    report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")

    manifest["finished_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    converged = report.first_converged_iteration
    print(f"records: {records_path}")
    print(f"chains: {ensemble.n_chains} ({ensemble.n_failed} failed)")
    print(f"converged at iteration: {converged if converged is not None else 'not detected'}")
    return 0


def cmd_prior(args: argparse.Namespace) -> int:
    run_dir = Path(args.run)
    records_path = run_dir / "records.jsonl"
    if not records_path.exists():
        print(f"error: no records file at {records_path}", file=sys.stderr)
        return RUNTIME_ERROR
    ensemble = chains_mod.load(records_path)
    iteration = args.iteration if args.iteration is not None else ensemble.n_iterations
    bandwidth = "auto" if args.bandwidth is None else args.bandwidth
    density = chains_mod.empirical_prior(ensemble, at_iteration=iteration, bandwidth=bandwidth)
    values = ensemble.hypotheses_at(iteration)

    out_dir = Path(args.out) if args.out else run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "prior.csv"
    svg_path = out_dir / "prior.svg"
    reports.save_density_csv(density, csv_path)
    title = f"{ensemble.task_name} prior (iteration {iteration})"
    reports.plot_density(density, svg_path, samples=values, title=title)

    print(f"density: {csv_path}")
    print(f"figure: {svg_path}")
    print(f"chains used: {len(values)}")
    if values.ndim == 2:
        print(f"median (w0, w1): ({np.median(values[:, 0]):g}, {np.median(values[:, 1]):g})")
        print(f"mean (w0, w1): ({values[:, 0].mean():g}, {values[:, 1].mean():g})")
    else:
        print(f"median: {np.median(values):g}")
        print(f"mean: {values.mean():g}")
    return 0


def _fit_priors(args: argparse.Namespace) -> list[tuple[str, bayes.PriorSpec]]:
    chosen = args.prior or ["uniform", "sparse-strong"]
    direction = CausalDirection(args.direction)
    out = []
    for text in chosen:
        if text == "uniform":
            out.append(("uniform", bayes.UniformPrior()))
        elif text == "sparse-strong":
            out.append(
                (
                    "sparse-strong",
                    bayes.SparseStrongPrior(alpha=args.alpha, direction=direction),
                )
            )
        elif text.startswith("empirical:"):
            density = reports.load_density_csv(text[len("empirical:"):])
            if not isinstance(density, DensityGrid2D):
                raise UsageError("an empirical prior for fitting must be a 2D density grid")
            out.append(("empirical", bayes.EmpiricalPrior(grid=density)))
        else:
            raise UsageError(
                f"unknown prior {text!r}; expected uniform, sparse-strong, or empirical:PATH"
            )
    return out


def cmd_fit(args: argparse.Namespace) -> int:
    try:
        items = bayes.read_judgments_csv(args.judgments)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR
    direction = CausalDirection(args.direction)
    items = [item for item in items if item.direction is direction]
    if args.limit is not None:
        items = items[: args.limit]
    if not items:
        print(f"error: no {direction.value} judgments in {args.judgments}", file=sys.stderr)
        return RUNTIME_ERROR

    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)

    series: dict[str, tuple[list[float], list[float]]] = {}
    metric_rows = []
    for label, prior_spec in _fit_priors(args):
        grid = bayes.prior_grid(prior_spec)
        predicted = bayes.predict_judgments(grid, items)
        predictions: list[float] = []
        judgments: list[float] = []
        for item in predicted:
            predictions.extend(item.model_prediction)
            judgments.extend(item.agent_judgment)
        metrics = bayes.fit_metrics(predictions, judgments)
        series[label] = (predictions, judgments)
        metric_rows.append((label, metrics))
        print(f"{label}: pearson={metrics.pearson:.4f} rmsd={metrics.rmsd:.4f}")
        if args.bins:
            rows = reports.binned_scatter(predictions, judgments, n_bins=args.bins)
            binned_path = out_dir / f"binned_{label.replace(':', '_')}.csv"
            reports.save_binned_scatter_csv(rows, binned_path)
            print(f"binned data: {binned_path}")

    metrics_path = out_dir / "fit_metrics.csv"
    with open(metrics_path, "w", encoding="utf-8") as fh:
        fh.write("prior,pearson,rmsd\n")
        for label, metrics in metric_rows:
            fh.write(f"{label},{metrics.pearson!r},{metrics.rmsd!r}\n")
    svg_path = out_dir / "fit.svg"
    reports.plot_fit_scatter(series, svg_path, title=f"{direction.value} judgments")
    print(f"metrics: {metrics_path}")
    print(f"figure: {svg_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iterprior",
        description="Recover an agent's implicit prior with iterated in-context learning chains.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tasks = sub.add_parser("tasks", help="list builtin (and configured) tasks")
    p_tasks.add_argument("--config", help="TOML file with extra task definitions")
    p_tasks.set_defaults(func=cmd_tasks)

    p_run = sub.add_parser("run", help="run an iterated learning ensemble")
    p_run.add_argument("--task", required=True, help="task name (see `iterprior tasks`)")
    p_run.add_argument("--agent", choices=["sim", "llm"], default="sim")
    p_run.add_argument("--chains", type=int, default=100)
    p_run.add_argument("--iters", type=int, default=12)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--alpha", type=float, default=0.05, help="convergence significance level")
    p_run.add_argument("--out", help="run directory (default: runs/<timestamp>-seed<seed>)")
    p_run.add_argument(
        "--parallel",
        type=int,
        default=max(1, os.cpu_count() or 1),
        help="concurrent chains (default: processor count)",
    )
    p_run.add_argument("--config", help="TOML file with extra task definitions")
    p_run.add_argument(
        "--sim-prior",
        default="uniform",
        help="simulated agent prior: uniform, beta:A,B, sparse-strong[:ALPHA], empirical:PATH",
    )
    p_run.add_argument("--endpoint", help="chat-completions URL (llm agent)")
    p_run.add_argument("--model", help="model identifier (llm agent)")
    p_run.add_argument("--temperature", type=float, default=1.0)
    p_run.add_argument("--timeout", type=float, default=60.0)
    p_run.add_argument("--retries", type=int, default=5)
    p_run.add_argument("--concurrency", type=int, default=4, help="max in-flight llm requests")
    p_run.add_argument("--credential-env", default="ITERPRIOR_API_KEY")
    p_run.add_argument(
        "--capture", action="store_true", help="log llm requests/responses into the run directory"
    )
    p_run.set_defaults(func=cmd_run)

    p_prior = sub.add_parser("prior", help="extract an empirical prior from a run directory")
    p_prior.add_argument("--run", required=True, help="run directory containing records.jsonl")
    p_prior.add_argument("--iteration", type=int, help="iteration to read (default: last)")
    p_prior.add_argument("--bandwidth", type=float, help="kernel bandwidth (default: automatic)")
    p_prior.add_argument("--out", help="output directory (default: the run directory)")
    p_prior.set_defaults(func=cmd_prior)

    p_fit = sub.add_parser("fit", help="score priors against recorded causal judgments")
    p_fit.add_argument("--judgments", required=True, help="judgments CSV file")
    p_fit.add_argument("--direction", required=True, choices=["generative", "preventive"])
    p_fit.add_argument(
        "--prior",
        action="append",
        help="prior to score: uniform, sparse-strong, empirical:PATH (repeatable; "
        "default: uniform and sparse-strong)",
    )
    p_fit.add_argument("--alpha", type=float, default=5.0, help="sparse-strong concentration")
    p_fit.add_argument("--bins", type=int, default=0, help="emit window-binned scatter data")
    p_fit.add_argument("--limit", type=int, help="use only the first N judgment rows")
    p_fit.add_argument("--out", help="output directory (default: current directory)")
    p_fit.set_defaults(func=cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except IterPriorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
