"""Tests for the builtin task registry, prompt rendering, and seeding."""

from collections import Counter

import numpy as np
import pytest

from iterprior.errors import TemplateError
from iterprior.likelihoods import (
    CausalContingencyLikelihood,
    CausalDirection,
    CausalHypothesis,
    CausalObservation,
    CoinFlipLikelihood,
    CoinObservation,
    ScalarObservation,
    UniformIntLikelihood,
)
from iterprior.numerics import RandomStream
from iterprior.tasks import (
    HeadProbsSeed,
    HypothesisKind,
    MaxValueSeed,
    ResponseSchema,
    builtin_tasks,
    initial_observation,
    load_task_config,
    render_prompt,
    sample_observation,
    seed_hypothesis_for_chain,
)

EXPECTED_NAMES = [
    "causal-genes-generative",
    "causal-genes-preventive",
    "coin-flips",
    "lifespan-male",
    "movie-grosses",
    "poem-lines",
    "pharaoh-reigns",
    "movie-runtimes",
    "cake-baking-times",
    "causal-pencils",
    "causal-medicines",
    "causal-dogs",
    "causal-psychics",
    "superhuman-ai",
    "zero-carbon",
    "mars-colony",
]

CLOSING_INSTRUCTIONS = (
    "without outputing anything else.",
    "Do not include any additional text or explanation in your response.",
)


class TestRegistry:
    def test_sixteen_tasks_in_stable_order(self):
        assert list(builtin_tasks()) == EXPECTED_NAMES

    def test_lifespan_binding(self):
        spec = builtin_tasks()["lifespan-male"]
        assert spec.seed_rule == MaxValueSeed(t_max=150)
        assert spec.likelihood == UniformIntLikelihood(lo=1)
        assert spec.describe_likelihood() == "U[1, h]"
        assert spec.hypothesis_bounds == (1.0, 150.0)

    def test_superhuman_ai_binding(self):
        spec = builtin_tasks()["superhuman-ai"]
        assert spec.seed_rule == MaxValueSeed(t_max=2200)
        assert spec.describe_likelihood() == "U[2024, h]"
        assert spec.kind is HypothesisKind.YEAR

    def test_coin_binding(self):
        spec = builtin_tasks()["coin-flips"]
        assert spec.seed_rule == HeadProbsSeed(values=(0.3, 0.5, 0.7))
        assert spec.likelihood == CoinFlipLikelihood(n_flips=10)
        assert spec.describe_likelihood() == "Bin(10, h)"

    def test_table_transcription(self):
        tasks = builtin_tasks()
        expected = {
            "movie-grosses": (0.0, 3000.0),
            "poem-lines": (1.0, 200.0),
            "pharaoh-reigns": (0.0, 100.0),
            "movie-runtimes": (0.0, 800.0),
            "cake-baking-times": (0.0, 120.0),
            "zero-carbon": (2024.0, 2200.0),
            "mars-colony": (2024.0, 2200.0),
        }
        for name, bounds in expected.items():
            assert tasks[name].hypothesis_bounds == bounds

    def test_causal_tasks_carry_both_directions(self):
        tasks = builtin_tasks()
        gen = tasks["causal-genes-generative"].likelihood
        prev = tasks["causal-genes-preventive"].likelihood
        assert gen.direction is CausalDirection.GENERATIVE
        assert prev.direction is CausalDirection.PREVENTIVE
        assert gen.n_c_plus == gen.n_c_minus == 16
        # the two tasks share the background question and differ in the second
        gen_templates = tasks["causal-genes-generative"].user_templates
        prev_templates = tasks["causal-genes-preventive"].user_templates
        assert gen_templates[0] == prev_templates[0]
        assert gen_templates[1] != prev_templates[1]
        assert "turned on" in gen_templates[1]
        assert "turned off" in prev_templates[1]

    def test_cover_stories_are_generative_two_number(self):
        tasks = builtin_tasks()
        for name in ("causal-pencils", "causal-medicines", "causal-dogs", "causal-psychics"):
            spec = tasks[name]
            assert spec.likelihood.direction is CausalDirection.GENERATIVE
            assert spec.response_schema is ResponseSchema.TWO_NUMBERS
            assert spec.questions_per_step == 1


class TestRendering:
    def test_lifespan_prompt(self):
        spec = builtin_tasks()["lifespan-male"]
        conversations = render_prompt(spec, ScalarObservation(probe=30.0))
        assert len(conversations) == 1
        system, user = conversations[0]
        assert system["role"] == "system"
        assert "a random 30-year-old man" in user["content"]

    def test_coin_prompt(self):
        spec = builtin_tasks()["coin-flips"]
        [(_, user)] = render_prompt(spec, CoinObservation(k_heads=7))
        assert "7 resulted in heads and 3 in tails" in user["content"]

    def test_genes_prompt_renders_both_questions(self):
        spec = builtin_tasks()["causal-genes-generative"]
        obs = CausalObservation(n_c_plus=16, n_c_minus=16, k_plus=12, k_minus=4)
        conversations = render_prompt(spec, obs)
        assert len(conversations) == 2
        first = conversations[0][1]["content"]
        second = conversations[1][1]["content"]
        for text in (first, second):
            assert "4 of 16 DNA fragments were turned on" in text
            assert "12 of 16 DNA fragments were turned on" in text
        assert "not exposed to the protein, in how many of them" in first
        assert "gene is currently off" in second

    def test_real_probe_rendered_to_one_decimal(self):
        spec = builtin_tasks()["movie-grosses"]
        [(_, user)] = render_prompt(spec, ScalarObservation(probe=123.456))
        assert "123.5 million dollars" in user["content"]

    def test_prompts_end_with_answer_instruction(self):
        for spec in builtin_tasks().values():
            for template in spec.user_templates:
                assert template.endswith(CLOSING_INSTRUCTIONS), spec.name

    def test_wrong_observation_kind(self):
        spec = builtin_tasks()["lifespan-male"]
        with pytest.raises(TemplateError):
            render_prompt(spec, CoinObservation(k_heads=3))

    def test_roundtrip_fuzz_no_template_errors(self):
        # every builtin task renders everything its own likelihood can produce
        rng = RandomStream(99)
        uniform = np.random.default_rng(7)
        for spec in builtin_tasks().values():
            lo, hi = spec.hypothesis_bounds
            for i in range(1000):
                if spec.kind is HypothesisKind.CAUSAL_PAIR:
                    h = CausalHypothesis(uniform.uniform(), uniform.uniform())
                else:
                    h = uniform.uniform(lo, hi)
                obs = sample_observation(rng, spec, h)
                conversations = render_prompt(spec, obs)
                assert conversations
            # the seed path must render too
            obs = initial_observation(rng, spec, chain_index=3)
            render_prompt(spec, obs)


class TestSeeding:
    def test_causal_round_robin_is_25_per_pair(self):
        spec = builtin_tasks()["causal-genes-generative"]
        assignments = Counter(seed_hypothesis_for_chain(spec, i) for i in range(100))
        assert sorted(assignments.values()) == [25, 25, 25, 25]

    def test_coin_round_robin_split(self):
        spec = builtin_tasks()["coin-flips"]
        assignments = Counter(seed_hypothesis_for_chain(spec, i) for i in range(100))
        assert sorted(assignments.values()) == [33, 33, 34]

    def test_max_value_seed_is_constant(self):
        spec = builtin_tasks()["lifespan-male"]
        assert {seed_hypothesis_for_chain(spec, i) for i in range(10)} == {150}

    def test_initial_observation_within_bounds(self):
        rng = RandomStream(5)
        spec = builtin_tasks()["lifespan-male"]
        for i in range(200):
            obs = initial_observation(rng, spec, chain_index=i)
            assert 1 <= obs.probe <= 150

    def test_causal_seed_mean(self):
        # seed pair (0.7, 0.7) generative: mean k_plus = 16 * 0.91 = 14.56
        spec = builtin_tasks()["causal-genes-generative"]
        rng = RandomStream(31)
        draws = [initial_observation(rng, spec, chain_index=3).k_plus for _ in range(4000)]
        assert abs(np.mean(draws) - 14.56) < 3 * np.sqrt(16 * 0.91 * 0.09 / 4000) * 1.2

    def test_coin_seed_mean(self):
        spec = builtin_tasks()["coin-flips"]
        rng = RandomStream(13)
        draws = [initial_observation(rng, spec, chain_index=1).k_heads for _ in range(10_000)]
        assert abs(np.mean(draws) - 5.0) < 0.05


class TestHypothesisFromRaw:
    def test_scalar_identity(self):
        spec = builtin_tasks()["lifespan-male"]
        assert spec.hypothesis_from_raw((85.0,)) == 85.0
        assert spec.raw_response_bounds == (1.0, 150.0)

    def test_proportion_rescaled(self):
        spec = builtin_tasks()["coin-flips"]
        assert spec.hypothesis_from_raw((85.0,)) == 0.85
        assert spec.raw_response_bounds == (0.0, 100.0)

    def test_causal_two_question_counts(self):
        spec = builtin_tasks()["causal-genes-generative"]
        assert spec.hypothesis_from_raw((30.0, 70.0)) == CausalHypothesis(0.3, 0.7)

    def test_causal_two_number_already_scaled(self):
        spec = builtin_tasks()["causal-pencils"]
        assert spec.hypothesis_from_raw((0.5, 0.75)) == CausalHypothesis(0.5, 0.75)


class TestTaskConfig:
    CONFIG = '''
[[task]]
name = "dice-rolls"
kind = "proportion"
system_prompt = "You judge whether a die is loaded toward six."
user_template = """Out of {n_flips} rolls, {k_heads} showed a six and {k_tails} did not. Out of 100 further rolls, how many sixes do you expect? Please limit your answer to a single value without outputing anything else."""
likelihood = "coin"
n_flips = 12
head_probs = [0.2, 0.5]
hypothesis_bounds = [0.0, 1.0]
'''

    def test_load_and_render(self, tmp_path):
        path = tmp_path / "tasks.toml"
        path.write_text(self.CONFIG)
        tasks = load_task_config(path)
        spec = tasks["dice-rolls"]
        assert spec.likelihood == CoinFlipLikelihood(n_flips=12)
        obs = initial_observation(RandomStream(0), spec, chain_index=0)
        [(_, user)] = render_prompt(spec, obs)
        assert "Out of 12 rolls" in user["content"]

    def test_missing_field(self, tmp_path):
        path = tmp_path / "tasks.toml"
        path.write_text('[[task]]\nname = "x"\nkind = "scalar"\n')
        with pytest.raises(ValueError, match="missing required field"):
            load_task_config(path)

    def test_unknown_likelihood(self, tmp_path):
        path = tmp_path / "tasks.toml"
        path.write_text(
            '[[task]]\nname = "x"\nkind = "scalar"\nsystem_prompt = "s"\n'
            'user_template = "{probe}"\nlikelihood = "cauchy"\nt_max = 5\n'
            "hypothesis_bounds = [0, 5]\n"
        )
        with pytest.raises(ValueError, match="unknown likelihood"):
            load_task_config(path)

    def test_unknown_placeholder_rejected(self, tmp_path):
        path = tmp_path / "tasks.toml"
        path.write_text(
            '[[task]]\nname = "x"\nkind = "scalar"\nsystem_prompt = "s"\n'
            'user_template = "value {oops}"\nlikelihood = "uniform-int"\n'
            "lower_bound = 1\nt_max = 5\nhypothesis_bounds = [1, 5]\n"
        )
        with pytest.raises(TemplateError):
            load_task_config(path)

    def test_empty_config(self, tmp_path):
        path = tmp_path / "tasks.toml"
        path.write_text("# no tasks here\n")
        with pytest.raises(ValueError, match="no \\[\\[task\\]\\] tables"):
            load_task_config(path)
