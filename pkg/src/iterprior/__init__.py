"""Recover an agent's implicit prior distribution with iterated in-context
learning chains, and score recovered priors against recorded judgments."""

__version__ = "0.1.0"

from .numerics import (
    Density1D,
    DensityGrid2D,
    RandomStream,
    kde_density_1d,
    kde_density_2d,
    mann_whitney_u,
    pearson_r,
    rmsd,
)
from .likelihoods import (
    CausalDirection,
    CausalHypothesis,
    CausalObservation,
    CoinObservation,
    ScalarObservation,
)
from .tasks import TaskSpec, builtin_tasks, load_task_config
from .agents import (
    AgentResponse,
    LlmAgent,
    LlmAgentSpec,
    SimulatedCausalAgent,
    SimulatedScalarAgent,
    parse_numeric_response,
    simulated_agent_for_task,
)
from .chains import (
    ChainRecord,
    ChainSet,
    EnsembleConfig,
    detect_convergence,
    empirical_prior,
    load,
    persist,
    run_chain,
    run_ensemble,
)
from .bayes import (
    EmpiricalPrior,
    SparseStrongPrior,
    UniformPrior,
    fit_metrics,
    generate_judgment_items,
    posterior_grid,
    posterior_mean,
    prior_grid,
)

__all__ = [
    "__version__",
    "RandomStream",
    "Density1D",
    "DensityGrid2D",
    "kde_density_1d",
    "kde_density_2d",
    "mann_whitney_u",
    "pearson_r",
    "rmsd",
    "CausalDirection",
    "CausalHypothesis",
    "CausalObservation",
    "CoinObservation",
    "ScalarObservation",
    "TaskSpec",
    "builtin_tasks",
    "load_task_config",
    "AgentResponse",
    "SimulatedScalarAgent",
    "SimulatedCausalAgent",
    "simulated_agent_for_task",
    "LlmAgent",
    "LlmAgentSpec",
    "parse_numeric_response",
    "ChainRecord",
    "ChainSet",
    "EnsembleConfig",
    "run_chain",
    "run_ensemble",
    "detect_convergence",
    "empirical_prior",
    "persist",
    "load",
    "UniformPrior",
    "SparseStrongPrior",
    "EmpiricalPrior",
    "prior_grid",
    "posterior_grid",
    "posterior_mean",
    "generate_judgment_items",
    "fit_metrics",
]
