"""Adaptive log-optimal knowledge growth under a hidden categorical environment."""

from .belief import BeliefState, init_carnap, init_laplace, observe, posterior, subjective_entropy
from .config import ExperimentConfig, StrategyKind, config_from_dict, config_to_dict, parse_config
from .dynamics import (
    StageRecord,
    Trajectory,
    average_growth,
    capacity,
    make_rng,
    order,
    relative_entropy,
    run_experiment,
    stage_step,
)
from .environment import (
    EnvironmentSpec,
    StageObservation,
    expected_counts,
    make_environment,
    sample_stage,
    sample_stages,
    true_entropy,
)
from .optimizer import (
    IdentityTerms,
    RelevanceSolution,
    brute_force_relevance,
    deterministic_growth,
    expected_growth,
    identity_decomposition,
    kkt_residual,
    renormalize,
    solve_relevance,
)

__version__ = "0.1.0"
