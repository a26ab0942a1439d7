"""Tests for the command-line surface: flags, artifacts, and exit codes."""

import dataclasses
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from iterprior.bayes import (
    UniformPrior,
    generate_judgment_items,
    predict_judgments,
    prior_grid,
    write_judgments_csv,
)
from iterprior.cli import build_parser, main
from iterprior.likelihoods import CausalDirection


def run_cli(*argv) -> int:
    return main(list(argv))


def read_csv_rows(path):
    return [line for line in path.read_text().splitlines() if line]


@pytest.fixture
def judgments_file(tmp_path):
    """Judgments equal to the uniform-prior model predictions on a small sweep."""
    items = generate_judgment_items([CausalDirection.GENERATIVE])[:50]
    predicted = predict_judgments(prior_grid(UniformPrior()), items)
    judged = [
        dataclasses.replace(item, agent_judgment=item.model_prediction) for item in predicted
    ]
    path = tmp_path / "judgments.csv"
    write_judgments_csv(judged, path)
    return path


class TestTasksCommand:
    def test_lists_all_sixteen(self, capsys):
        assert run_cli("tasks") == 0
        out = capsys.readouterr().out
        data_lines = [l for l in out.splitlines() if l and not l.startswith(("name", "-"))]
        assert len(data_lines) == 16
        assert "lifespan-male" in out
        assert "U[1, h]" in out
        assert "150" in out

    def test_stable_output(self, capsys):
        run_cli("tasks")
        first = capsys.readouterr().out
        run_cli("tasks")
        second = capsys.readouterr().out
        assert first == second


class TestRunCommand:
    def test_defaults_follow_protocol(self):
        args = build_parser().parse_args(["run", "--task", "coin-flips"])
        assert args.chains == 100
        assert args.iters == 12
        assert args.temperature == 1.0
        assert args.agent == "sim"

    def test_writes_manifest_records_report(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = run_cli(
            "run", "--task", "coin-flips", "--agent", "sim",
            "--chains", "20", "--iters", "4", "--seed", "7",
            "--out", str(out), "--parallel", "1",
        )
        assert code == 0
        assert (out / "manifest.json").exists()
        assert (out / "records.jsonl").exists()
        assert (out / "convergence.json").exists()
        manifest = (out / "manifest.json").read_text()
        assert '"finished_at"' in manifest and '"task": "coin-flips"' in manifest

    def test_byte_identical_reruns(self, tmp_path):
        args = (
            "run", "--task", "coin-flips", "--agent", "sim",
            "--chains", "50", "--iters", "12", "--seed", "7", "--parallel", "2",
        )
        assert run_cli(*args, "--out", str(tmp_path / "a")) == 0
        assert run_cli(*args, "--out", str(tmp_path / "b")) == 0
        a = (tmp_path / "a" / "records.jsonl").read_bytes()
        b = (tmp_path / "b" / "records.jsonl").read_bytes()
        assert a == b

    def test_unknown_task_is_usage_error(self, capsys):
        assert run_cli("run", "--task", "nope", "--agent", "sim") == 2
        assert "unknown task" in capsys.readouterr().err

    def test_llm_without_credential_fails_before_any_request(self, monkeypatch, capsys, tmp_path):
        monkeypatch.delenv("ITERPRIOR_API_KEY", raising=False)
        code = run_cli(
            "run", "--task", "coin-flips", "--agent", "llm",
            "--endpoint", "http://127.0.0.1:1/v1", "--model", "m",
            "--out", str(tmp_path / "x"),
        )
        assert code == 1
        assert "ITERPRIOR_API_KEY" in capsys.readouterr().err

    def test_llm_requires_endpoint_and_model(self, tmp_path, capsys):
        code = run_cli("run", "--task", "coin-flips", "--agent", "llm", "--out", str(tmp_path))
        assert code == 2

    def test_sim_prior_flag(self, tmp_path):
        code = run_cli(
            "run", "--task", "coin-flips", "--agent", "sim", "--sim-prior", "beta:0.2,0.2",
            "--chains", "10", "--iters", "3", "--seed", "1", "--out", str(tmp_path / "r"),
        )
        assert code == 0


class TestPriorCommand:
    @pytest.fixture
    def scalar_run(self, tmp_path):
        out = tmp_path / "run1d"
        run_cli(
            "run", "--task", "lifespan-male", "--agent", "sim",
            "--chains", "40", "--iters", "6", "--seed", "3",
            "--out", str(out), "--parallel", "1",
        )
        return out

    def test_density_and_figure(self, scalar_run, capsys):
        assert run_cli("prior", "--run", str(scalar_run)) == 0
        rows = read_csv_rows(scalar_run / "prior.csv")
        assert rows[0] == "bin_center,mass"
        assert len(rows) == 101
        masses = np.array([float(r.split(",")[1]) for r in rows[1:]])
        assert abs(masses.sum() - 1.0) < 1e-9
        ET.parse(scalar_run / "prior.svg")  # well-formed XML
        out = capsys.readouterr().out
        assert "median:" in out

    def test_2d_density_matrix(self, tmp_path):
        out = tmp_path / "run2d"
        run_cli(
            "run", "--task", "causal-genes-generative", "--agent", "sim",
            "--chains", "12", "--iters", "3", "--seed", "5", "--out", str(out),
        )
        assert run_cli("prior", "--run", str(out)) == 0
        rows = read_csv_rows(out / "prior.csv")
        assert len(rows) == 101
        assert all(len(r.split(",")) == 101 for r in rows)
        ET.parse(out / "prior.svg")

    def test_missing_records(self, tmp_path, capsys):
        assert run_cli("prior", "--run", str(tmp_path / "empty")) == 1
        assert "no records" in capsys.readouterr().err

    def test_inputs_not_mutated(self, scalar_run, tmp_path):
        before = {p.name: p.read_bytes() for p in scalar_run.iterdir()}
        assert run_cli("prior", "--run", str(scalar_run), "--out", str(tmp_path / "elsewhere")) == 0
        after = {p.name: p.read_bytes() for p in scalar_run.iterdir()}
        assert before == after

    def test_iteration_selection(self, scalar_run):
        assert run_cli("prior", "--run", str(scalar_run), "--iteration", "2") == 0

    def test_rerun_rewrites_identical_artifacts(self, scalar_run, tmp_path):
        first = tmp_path / "first"
        second = tmp_path / "second"
        assert run_cli("prior", "--run", str(scalar_run), "--out", str(first)) == 0
        assert run_cli("prior", "--run", str(scalar_run), "--out", str(second)) == 0
        assert (first / "prior.csv").read_bytes() == (second / "prior.csv").read_bytes()
        assert (first / "prior.svg").read_bytes() == (second / "prior.svg").read_bytes()


class TestFitCommand:
    def test_perfect_judgments_score_perfectly(self, judgments_file, tmp_path, capsys):
        out = tmp_path / "fit"
        code = run_cli(
            "fit", "--judgments", str(judgments_file), "--direction", "generative",
            "--prior", "uniform", "--out", str(out),
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "pearson=1.0000" in stdout
        assert "rmsd=0.0000" in stdout
        ET.parse(out / "fit.svg")
        rows = read_csv_rows(out / "fit_metrics.csv")
        assert rows[0] == "prior,pearson,rmsd"

    def test_binned_output_has_requested_bins(self, judgments_file, tmp_path):
        out = tmp_path / "fit"
        code = run_cli(
            "fit", "--judgments", str(judgments_file), "--direction", "generative",
            "--prior", "uniform", "--bins", "13", "--out", str(out),
        )
        assert code == 0
        rows = read_csv_rows(out / "binned_uniform.csv")
        assert len(rows) == 14  # header + 13 windows

    def test_alpha_zero_matches_uniform(self, judgments_file, tmp_path, capsys):
        out = tmp_path / "fit"
        code = run_cli(
            "fit", "--judgments", str(judgments_file), "--direction", "generative",
            "--prior", "uniform", "--prior", "sparse-strong", "--alpha", "0",
            "--out", str(out),
        )
        assert code == 0
        rows = read_csv_rows(out / "fit_metrics.csv")
        uniform = rows[1].split(",")[1:]
        sparse = rows[2].split(",")[1:]
        assert uniform == sparse

    def test_empirical_prior_from_density_file(self, judgments_file, tmp_path):
        from iterprior.numerics import DensityGrid2D
        from iterprior.reports import save_density_csv

        density_path = tmp_path / "empirical.csv"
        save_density_csv(DensityGrid2D.uniform(), density_path)
        out = tmp_path / "fit"
        code = run_cli(
            "fit", "--judgments", str(judgments_file), "--direction", "generative",
            "--prior", f"empirical:{density_path}", "--out", str(out),
        )
        assert code == 0

    def test_malformed_judgments_row_exits_1(self, tmp_path, capsys):
        path = tmp_path / "judgments.csv"
        path.write_text(
            "direction,n_c_plus,n_c_minus,k_plus,k_minus,judged_w0,judged_w1\n"
            "generative,16,16,8,8,0.5,0.5\n"
            "generative,16,16,8,8,oops,0.5\n"
        )
        code = run_cli("fit", "--judgments", str(path), "--direction", "generative")
        assert code == 1
        assert "row 3" in capsys.readouterr().err

    def test_limit_option(self, judgments_file, tmp_path, capsys):
        code = run_cli(
            "fit", "--judgments", str(judgments_file), "--direction", "generative",
            "--prior", "uniform", "--limit", "10", "--out", str(tmp_path / "f"),
        )
        assert code == 0

    def test_wrong_direction_is_runtime_error(self, judgments_file, tmp_path, capsys):
        code = run_cli(
            "fit", "--judgments", str(judgments_file), "--direction", "preventive",
            "--out", str(tmp_path / "f"),
        )
        assert code == 1
        assert "no preventive judgments" in capsys.readouterr().err


class TestCustomConfig:
    CONFIG = '''
[[task]]
name = "marathon-finish"
kind = "scalar"
system_prompt = "You are an expert at predicting marathon finish times."
user_template = "A runner has been on the course for {probe} minutes. What total finish time in minutes do you predict? Please limit your answer to a single value without outputing anything else."
likelihood = "uniform-real"
lower_bound = 0.0
t_max = 360
hypothesis_bounds = [0.0, 360.0]
'''

    def test_config_task_listed_and_runnable(self, tmp_path, capsys):
        config = tmp_path / "tasks.toml"
        config.write_text(self.CONFIG)
        assert run_cli("tasks", "--config", str(config)) == 0
        assert "marathon-finish" in capsys.readouterr().out
        code = run_cli(
            "run", "--task", "marathon-finish", "--agent", "sim", "--config", str(config),
            "--chains", "8", "--iters", "3", "--seed", "2", "--out", str(tmp_path / "r"),
        )
        assert code == 0
