"""Declarative registry of the builtin elicitation tasks.

A task binds prompt templates to a likelihood family, a seeding rule for the
first observation, and hypothesis bounds. Sixteen tasks ship builtin: two
gene/protein causal-strength tasks (generative and preventive), four
alternative causal cover stories, the coin-bias proportion task, six everyday
future-prediction quantities, and three speculative two-stage events. Custom
tasks with the same fields can be loaded from a TOML file.
"""

from __future__ import annotations

import enum
import string
import sys
from dataclasses import dataclass, field

from . import prompts
from .errors import TemplateError
from .likelihoods import (
    CausalContingencyLikelihood,
    CausalDirection,
    CausalHypothesis,
    CausalObservation,
    CoinFlipLikelihood,
    CoinObservation,
    Likelihood,
    ScalarObservation,
    UniformIntLikelihood,
    UniformRealLikelihood,
)
from .numerics import RandomStream

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "HypothesisKind",
    "ResponseSchema",
    "MaxValueSeed",
    "CausalPairsSeed",
    "HeadProbsSeed",
    "TaskSpec",
    "Observation",
    "builtin_tasks",
    "render_prompt",
    "seed_hypothesis_for_chain",
    "initial_observation",
    "sample_observation",
    "load_task_config",
]

Observation = ScalarObservation | CoinObservation | CausalObservation


class HypothesisKind(enum.Enum):
    CAUSAL_PAIR = "causal-pair"
    PROPORTION = "proportion"
    SCALAR = "scalar"
    YEAR = "year"

    def __str__(self) -> str:  # pragma: no cover - display sugar
        return self.value


class ResponseSchema(enum.Enum):
    ONE_NUMBER = "one-number"
    TWO_NUMBERS = "two-numbers"


@dataclass(frozen=True)
class MaxValueSeed:
    """Seed the first observation by sampling the likelihood at hypothesis ``t_max``."""

    t_max: float

    def display(self) -> str:
        value = int(self.t_max) if float(self.t_max).is_integer() else self.t_max
        return f"t_max={value}"


@dataclass(frozen=True)
class CausalPairsSeed:
    """Seed chains round-robin over fixed (w0, w1) strength pairs."""

    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("at least one seed pair is required")

    def display(self) -> str:
        return "(w0,w1) in {" + ", ".join(f"({a}, {b})" for a, b in self.pairs) + "}"


@dataclass(frozen=True)
class HeadProbsSeed:
    """Seed chains round-robin over fixed head probabilities."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("at least one seed probability is required")

    def display(self) -> str:
        return "p(head) in {" + ", ".join(str(v) for v in self.values) + "}"


SeedRule = MaxValueSeed | CausalPairsSeed | HeadProbsSeed

# Out-of-100 counts are elicited for proportion and causal answers.
_COUNT_SCALE = 100.0


@dataclass(frozen=True)
class TaskSpec:
    """One elicitation task: prompts, likelihood, seeding, and bounds."""

    name: str
    kind: HypothesisKind
    system_prompt: str
    user_templates: tuple[str, ...]
    response_schema: ResponseSchema
    likelihood: Likelihood
    seed_rule: SeedRule
    hypothesis_bounds: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.hypothesis_bounds
        if not lo < hi:
            raise ValueError(f"hypothesis bounds must be ordered, got [{lo}, {hi}]")
        if not self.user_templates:
            raise ValueError("a task needs at least one user template")
        allowed = set(self._placeholder_names())
        for template in self.user_templates:
            for _, name, _, _ in string.Formatter().parse(template):
                if name is not None and name not in allowed:
                    raise TemplateError(
                        f"task {self.name!r}: template placeholder {name!r} is not "
                        f"produced by its observation renderer (expected {sorted(allowed)})"
                    )

    def _placeholder_names(self) -> tuple[str, ...]:
        if isinstance(self.likelihood, CausalContingencyLikelihood):
            return ("k_plus", "n_plus", "k_minus", "n_minus")
        if isinstance(self.likelihood, CoinFlipLikelihood):
            return ("k_heads", "k_tails", "n_flips")
        return ("probe",)

    def observation_fields(self, d: Observation) -> dict[str, str]:
        """Formatted placeholder values for rendering ``d`` into a prompt."""
        if isinstance(self.likelihood, CausalContingencyLikelihood):
            if not isinstance(d, CausalObservation):
                raise TemplateError(f"task {self.name!r} expects a causal observation")
            return {
                "k_plus": str(d.k_plus),
                "n_plus": str(d.n_c_plus),
                "k_minus": str(d.k_minus),
                "n_minus": str(d.n_c_minus),
            }
        if isinstance(self.likelihood, CoinFlipLikelihood):
            if not isinstance(d, CoinObservation):
                raise TemplateError(f"task {self.name!r} expects a coin observation")
            return {
                "k_heads": str(d.k_heads),
                "k_tails": str(d.n_flips - d.k_heads),
                "n_flips": str(d.n_flips),
            }
        if not isinstance(d, ScalarObservation):
            raise TemplateError(f"task {self.name!r} expects a scalar observation")
        return {"probe": self.likelihood.format_probe(d.probe)}

    @property
    def questions_per_step(self) -> int:
        return len(self.user_templates)

    @property
    def raw_response_bounds(self) -> tuple[float, float]:
        """Range a raw numeric answer must fall in, before any rescaling."""
        if self.kind in (HypothesisKind.PROPORTION, HypothesisKind.CAUSAL_PAIR):
            return (0.0, _COUNT_SCALE)
        return self.hypothesis_bounds

    def hypothesis_from_raw(self, values: tuple[float, ...]):
        """Combine parsed raw answers into this task's hypothesis."""
        if self.kind is HypothesisKind.CAUSAL_PAIR:
            if self.response_schema is ResponseSchema.TWO_NUMBERS:
                # parse already rescaled the count pair to strengths
                return CausalHypothesis(values[0], values[1])
            return CausalHypothesis(values[0] / _COUNT_SCALE, values[1] / _COUNT_SCALE)
        if self.kind is HypothesisKind.PROPORTION:
            return values[0] / _COUNT_SCALE
        return values[0]

    def describe_likelihood(self) -> str:
        return self.likelihood.display()

    def describe_seeds(self) -> str:
        return self.seed_rule.display()


def render_prompt(spec: TaskSpec, d: Observation) -> list[list[dict[str, str]]]:
    """Render ``d`` into one single-turn conversation per question.

    Each conversation is a ``[{role: system, ...}, {role: user, ...}]`` pair;
    tasks that elicit the two causal strengths with separate questions return
    two conversations.
    """
    values = spec.observation_fields(d)
    conversations = []
    for template in spec.user_templates:
        try:
            user_text = template.format(**values)
        except (KeyError, IndexError, ValueError) as exc:
            raise TemplateError(f"task {spec.name!r}: cannot render template: {exc}") from exc
        conversations.append(
            [
                {"role": "system", "content": spec.system_prompt},
                {"role": "user", "content": user_text},
            ]
        )
    return conversations


def seed_hypothesis_for_chain(spec: TaskSpec, chain_index: int):
    """The hypothesis the seed observation of chain ``chain_index`` is drawn at.

    List seeds (causal pairs, head probabilities) are assigned round-robin so
    an ensemble reproduces the intended split exactly, e.g. 25 chains per
    causal pair at 100 chains.
    """
    rule = spec.seed_rule
    if isinstance(rule, MaxValueSeed):
        return rule.t_max
    if isinstance(rule, HeadProbsSeed):
        return rule.values[chain_index % len(rule.values)]
    return CausalHypothesis(*rule.pairs[chain_index % len(rule.pairs)])


def initial_observation(rng: RandomStream, spec: TaskSpec, chain_index: int = 0) -> Observation:
    """Draw the seed observation for one chain from the likelihood at its seed hypothesis."""
    return spec.likelihood.sample(rng, seed_hypothesis_for_chain(spec, chain_index))


def sample_observation(rng: RandomStream, spec: TaskSpec, hypothesis) -> Observation:
    """Draw the next observation from p(d | h) for this task."""
    return spec.likelihood.sample(rng, hypothesis)


# ---------------------------------------------------------------------------
# Builtin registry
# ---------------------------------------------------------------------------

_CAUSAL_SEEDS = CausalPairsSeed(pairs=((0.3, 0.3), (0.3, 0.7), (0.7, 0.3), (0.7, 0.7)))

def _causal_task(
    name: str,
    direction: CausalDirection,
    system_prompt: str,
    user_templates: tuple[str, ...],
    schema: ResponseSchema,
) -> TaskSpec:
    return TaskSpec(
        name=name,
        kind=HypothesisKind.CAUSAL_PAIR,
        system_prompt=system_prompt,
        user_templates=user_templates,
        response_schema=schema,
        likelihood=CausalContingencyLikelihood(direction=direction),
        seed_rule=_CAUSAL_SEEDS,
        hypothesis_bounds=(0.0, 1.0),
    )


def _scalar_task(
    name: str,
    kind: HypothesisKind,
    system_prompt: str,
    user_template: str,
    likelihood,
    t_max: float,
) -> TaskSpec:
    return TaskSpec(
        name=name,
        kind=kind,
        system_prompt=system_prompt,
        user_templates=(user_template,),
        response_schema=ResponseSchema.ONE_NUMBER,
        likelihood=likelihood,
        seed_rule=MaxValueSeed(t_max=t_max),
        hypothesis_bounds=(float(likelihood.lo), float(t_max)),
    )


def _build_builtins() -> dict[str, TaskSpec]:
    specs = [
        _causal_task(
            "causal-genes-generative",
            CausalDirection.GENERATIVE,
            prompts.GENES_SYSTEM,
            (prompts.GENES_BACKGROUND_QUESTION, prompts.GENES_GENERATIVE_QUESTION),
            ResponseSchema.ONE_NUMBER,
        ),
        _causal_task(
            "causal-genes-preventive",
            CausalDirection.PREVENTIVE,
            prompts.GENES_SYSTEM,
            (prompts.GENES_BACKGROUND_QUESTION, prompts.GENES_PREVENTIVE_QUESTION),
            ResponseSchema.ONE_NUMBER,
        ),
        TaskSpec(
            name="coin-flips",
            kind=HypothesisKind.PROPORTION,
            system_prompt=prompts.COIN_SYSTEM,
            user_templates=(prompts.COIN_QUESTION,),
            response_schema=ResponseSchema.ONE_NUMBER,
            likelihood=CoinFlipLikelihood(n_flips=10),
            seed_rule=HeadProbsSeed(values=(0.3, 0.5, 0.7)),
            hypothesis_bounds=(0.0, 1.0),
        ),
        _scalar_task(
            "lifespan-male",
            HypothesisKind.SCALAR,
            prompts.LIFESPAN_SYSTEM,
            prompts.LIFESPAN_QUESTION,
            UniformIntLikelihood(lo=1),
            t_max=150,
        ),
        _scalar_task(
            "movie-grosses",
            HypothesisKind.SCALAR,
            prompts.GROSSES_SYSTEM,
            prompts.GROSSES_QUESTION,
            UniformRealLikelihood(lo=0.0),
            t_max=3000,
        ),
        _scalar_task(
            "poem-lines",
            HypothesisKind.SCALAR,
            prompts.POEMS_SYSTEM,
            prompts.POEMS_QUESTION,
            UniformIntLikelihood(lo=1),
            t_max=200,
        ),
        _scalar_task(
            "pharaoh-reigns",
            HypothesisKind.SCALAR,
            prompts.PHARAOHS_SYSTEM,
            prompts.PHARAOHS_QUESTION,
            UniformIntLikelihood(lo=0),
            t_max=100,
        ),
        _scalar_task(
            "movie-runtimes",
            HypothesisKind.SCALAR,
            prompts.RUNTIMES_SYSTEM,
            prompts.RUNTIMES_QUESTION,
            UniformRealLikelihood(lo=0.0),
            t_max=800,
        ),
        _scalar_task(
            "cake-baking-times",
            HypothesisKind.SCALAR,
            prompts.CAKE_SYSTEM,
            prompts.CAKE_QUESTION,
            UniformRealLikelihood(lo=0.0),
            t_max=120,
        ),
        _causal_task(
            "causal-pencils",
            CausalDirection.GENERATIVE,
            prompts.PENCILS_SYSTEM,
            (prompts.PENCILS_QUESTION,),
            ResponseSchema.TWO_NUMBERS,
        ),
        _causal_task(
            "causal-medicines",
            CausalDirection.GENERATIVE,
            prompts.MEDICINES_SYSTEM,
            (prompts.MEDICINES_QUESTION,),
            ResponseSchema.TWO_NUMBERS,
        ),
        _causal_task(
            "causal-dogs",
            CausalDirection.GENERATIVE,
            prompts.DOGS_SYSTEM,
            (prompts.DOGS_QUESTION,),
            ResponseSchema.TWO_NUMBERS,
        ),
        _causal_task(
            "causal-psychics",
            CausalDirection.GENERATIVE,
            prompts.PSYCHICS_SYSTEM,
            (prompts.PSYCHICS_QUESTION,),
            ResponseSchema.TWO_NUMBERS,
        ),
        _scalar_task(
            "superhuman-ai",
            HypothesisKind.YEAR,
            prompts.SUPERHUMAN_AI_SYSTEM,
            prompts.SUPERHUMAN_AI_QUESTION,
            UniformIntLikelihood(lo=2024),
            t_max=2200,
        ),
        _scalar_task(
            "zero-carbon",
            HypothesisKind.YEAR,
            prompts.ZERO_CARBON_SYSTEM,
            prompts.ZERO_CARBON_QUESTION,
            UniformIntLikelihood(lo=2024),
            t_max=2200,
        ),
        _scalar_task(
            "mars-colony",
            HypothesisKind.YEAR,
            prompts.MARS_COLONY_SYSTEM,
            prompts.MARS_COLONY_QUESTION,
            UniformIntLikelihood(lo=2024),
            t_max=2200,
        ),
    ]
    return {spec.name: spec for spec in specs}


_BUILTIN = _build_builtins()


def builtin_tasks() -> dict[str, TaskSpec]:
    """All builtin task specs, keyed by name, in stable listing order."""
    return dict(_BUILTIN)


# ---------------------------------------------------------------------------
# Custom task configs
# ---------------------------------------------------------------------------

_LIKELIHOOD_FAMILIES = {"uniform-int", "uniform-real", "coin", "causal"}


def _config_likelihood(entry: dict, where: str):
    family = entry.get("likelihood")
    if family not in _LIKELIHOOD_FAMILIES:
        raise ValueError(f"{where}: unknown likelihood {family!r} (expected one of {sorted(_LIKELIHOOD_FAMILIES)})")
    if family == "uniform-int":
        return UniformIntLikelihood(lo=int(entry.get("lower_bound", 1)))
    if family == "uniform-real":
        return UniformRealLikelihood(lo=float(entry.get("lower_bound", 0.0)))
    if family == "coin":
        return CoinFlipLikelihood(n_flips=int(entry.get("n_flips", 10)))
    direction = CausalDirection(entry.get("direction", "generative"))
    return CausalContingencyLikelihood(
        direction=direction,
        n_c_plus=int(entry.get("n_c_plus", 16)),
        n_c_minus=int(entry.get("n_c_minus", 16)),
    )


def _config_seed_rule(entry: dict, where: str) -> SeedRule:
    keys = [k for k in ("t_max", "head_probs", "causal_pairs") if k in entry]
    if len(keys) != 1:
        raise ValueError(f"{where}: exactly one of t_max, head_probs, causal_pairs is required")
    if keys[0] == "t_max":
        return MaxValueSeed(t_max=float(entry["t_max"]))
    if keys[0] == "head_probs":
        return HeadProbsSeed(values=tuple(float(v) for v in entry["head_probs"]))
    return CausalPairsSeed(pairs=tuple((float(a), float(b)) for a, b in entry["causal_pairs"]))


def load_task_config(path) -> dict[str, TaskSpec]:
    """Load custom task specs from a TOML file of ``[[task]]`` tables.

    See docs/task-config.md for the schema. Returned specs can be merged
    over :func:`builtin_tasks` by name.
    """
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    entries = data.get("task", [])
    if not entries:
        raise ValueError(f"{path}: no [[task]] tables found")
    out: dict[str, TaskSpec] = {}
    for i, entry in enumerate(entries):
        where = f"{path}: task #{i + 1}"
        try:
            name = entry["name"]
            kind = HypothesisKind(entry["kind"])
            templates = entry.get("user_templates") or [entry["user_template"]]
            schema = ResponseSchema(entry.get("response_schema", "one-number"))
            likelihood = _config_likelihood(entry, where)
            seed_rule = _config_seed_rule(entry, where)
            bounds = tuple(float(v) for v in entry["hypothesis_bounds"])
            spec = TaskSpec(
                name=name,
                kind=kind,
                system_prompt=entry["system_prompt"],
                user_templates=tuple(templates),
                response_schema=schema,
                likelihood=likelihood,
                seed_rule=seed_rule,
                hypothesis_bounds=bounds,  # type: ignore[arg-type]
            )
        except KeyError as exc:
            raise ValueError(f"{where}: missing required field {exc}") from exc
        out[spec.name] = spec
    return out
