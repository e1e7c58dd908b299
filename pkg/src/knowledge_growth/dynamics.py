"""The T-stage adaptive process: decide from the current belief, then observe.

Each stage picks a relevance vector from the belief held at the start of the
stage (the prior at t = 0), books its subjective expected log growth, and only
then absorbs the stage's packets. The Bellman functional is the running sum
of those stage values on top of ln K_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .belief import BeliefState, init_carnap, observe
from .config import ExperimentConfig, StrategyKind
from .environment import EnvironmentSpec, StageObservation, entropy, sample_stage, sample_stages
from .errors import DegenerateMaxEntropy
from .optimizer import RelevanceSolution, make_solution, solve_rows

__all__ = [
    "StageRecord", "Trajectory", "StrategyKind", "stage_step", "run_experiment",
    "average_growth", "capacity", "order", "relative_entropy", "make_rng",
]


@dataclass(frozen=True, eq=False)
class StageRecord:
    stage: int
    observation: StageObservation
    posterior_full: np.ndarray
    solution: RelevanceSolution
    stage_value: float
    true_expected_value: float
    f_cumulative: float
    ln_knowledge: float
    h_hat_full: float
    h_hat_active: float
    theta: float
    capacity: float
    order: float | None  # None when a single type is active


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Columnar history of one run; ``records`` materializes per-stage objects on demand."""

    config_echo: ExperimentConfig
    k0: float
    draws: np.ndarray
    posterior: np.ndarray
    decision_dist: np.ndarray
    r: np.ndarray
    active: np.ndarray
    multiplier: np.ndarray
    stage_value: np.ndarray
    true_value: np.ndarray
    f_cumulative: np.ndarray
    h_hat_full: np.ndarray
    h_hat_active: np.ndarray
    theta: np.ndarray
    capacity: np.ndarray
    order: np.ndarray
    g_star_avg: float

    @property
    def t_horizon(self) -> int:
        return self.stage_value.size

    @property
    def ln_k0(self) -> float:
        return math.log(self.k0)

    def record(self, t: int) -> StageRecord:
        return _make_record(self._columns, t, t, StageObservation(t, self.draws[t]), self.config_echo.environment.y)

    @cached_property
    def _columns(self) -> dict:
        return {name: getattr(self, name) for name in _COLUMN_NAMES}

    @cached_property
    def records(self) -> list[StageRecord]:
        return [self.record(t) for t in range(self.t_horizon)]

    def final_belief(self) -> BeliefState:
        state = init_carnap(self.config_echo.resolved_alpha())
        counts = self.draws.sum(axis=0)
        return BeliefState(state.alpha, counts, self.t_horizon, int(counts.sum()))


_COLUMN_NAMES = (
    "posterior", "decision_dist", "r", "active", "multiplier", "stage_value",
    "true_value", "f_cumulative", "h_hat_full", "h_hat_active", "theta", "capacity", "order",
)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator seeded through numpy's SeedSequence."""
    return np.random.Generator(np.random.PCG64(seed))


def _row_entropy(d: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(d > 0, d * np.log(d), 0.0)
    return -terms.sum(axis=1)


def _decide(dist: np.ndarray, y: np.ndarray, strategy: StrategyKind):
    n, m = dist.shape
    if strategy in (StrategyKind.SUBJECTIVE_OPTIMAL, StrategyKind.ORACLE):
        return solve_rows(dist, y)
    if strategy is StrategyKind.UNIFORM:
        r = np.full((n, m), 1.0 / m)
        active = np.ones((n, m), dtype=bool)
    elif strategy is StrategyKind.GREEDY:
        pick = np.argmax(dist * y, axis=1)
        r = np.zeros((n, m))
        r[np.arange(n), pick] = 1.0
        active = r > 0
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    q = np.where(active, dist, 0.0)
    q /= q.sum(axis=1, keepdims=True)
    value = np.where(active, q * np.log1p(r * y), 0.0).sum(axis=1)
    return r, active, np.full(n, np.nan), value


def _evaluate(prior_counts, alpha, spec: EnvironmentSpec, strategy: StrategyKind) -> dict:
    """Per-stage quantities for stages whose pre-decision counts are the rows of ``prior_counts``."""
    alpha = np.asarray(alpha, dtype=float)
    post = (prior_counts + alpha) / (prior_counts.sum(axis=1, keepdims=True) + alpha.sum())
    if strategy is StrategyKind.ORACLE:
        dist = np.broadcast_to(spec.p, post.shape).copy()
    else:
        dist = post
    r, active, lam, value = _decide(dist, spec.y, strategy)

    q_active = np.where(active, dist, 0.0)
    q_active /= q_active.sum(axis=1, keepdims=True)
    h_active = _row_entropy(q_active)
    h_star = np.log(active.sum(axis=1))
    h_full = _row_entropy(post)
    with np.errstate(divide="ignore", invalid="ignore"):
        omega = np.where(h_star > 0, 1.0 - h_active / h_star, np.nan)
    return {
        "posterior": post,
        "decision_dist": dist,
        "r": r,
        "active": active,
        "multiplier": lam,
        "stage_value": value,
        "true_value": (spec.p * np.log1p(r * spec.y)).sum(axis=1),
        "h_hat_full": h_full,
        "h_hat_active": h_active,
        "theta": np.abs(entropy(spec.p) - h_full),
        "capacity": h_star - h_active,
        "order": omega,
    }


def _make_record(cols: dict, row: int, stage: int, obs: StageObservation, y) -> StageRecord:
    omega = float(cols["order"][row])
    solution = make_solution(
        cols["decision_dist"][row], y, cols["r"][row], cols["active"][row],
        cols["multiplier"][row], cols["stage_value"][row],
    )
    f = float(cols["f_cumulative"][row])
    return StageRecord(
        stage=stage,
        observation=obs,
        posterior_full=cols["posterior"][row],
        solution=solution,
        stage_value=float(cols["stage_value"][row]),
        true_expected_value=float(cols["true_value"][row]),
        f_cumulative=f,
        ln_knowledge=f,
        h_hat_full=float(cols["h_hat_full"][row]),
        h_hat_active=float(cols["h_hat_active"][row]),
        theta=float(cols["theta"][row]),
        capacity=float(cols["capacity"][row]),
        order=None if math.isnan(omega) else omega,
    )


def stage_step(
    belief: BeliefState,
    spec: EnvironmentSpec,
    strategy: StrategyKind,
    rng: np.random.Generator,
    draws_per_stage: int = 1,
    f_prev: float = 0.0,
) -> tuple[BeliefState, StageRecord]:
    """Advance one stage. ``f_prev`` is the Bellman value so far (ln K_0 before the first stage)."""
    strategy = StrategyKind(strategy)
    cols = _evaluate(belief.counts[None, :], belief.alpha, spec, strategy)
    cols["f_cumulative"] = np.array([f_prev + cols["stage_value"][0]])
    obs = sample_stage(spec, rng, draws_per_stage, stage=belief.stage)
    record = _make_record(cols, 0, belief.stage, obs, spec.y)
    return observe(belief, obs), record


def run_experiment(config: ExperimentConfig) -> Trajectory:
    """Run ``config.t_horizon`` stages from the configured prior and seed.

    Vectorized over stages, but stage t only sees the counts of stages < t, so
    the result equals folding :func:`stage_step` from the prior with the same
    generator.
    """
    spec = config.environment
    T = config.t_horizon
    draws = sample_stages(spec, make_rng(config.seed), T, config.draws_per_stage)
    prior_counts = np.zeros_like(draws)
    np.cumsum(draws[:-1], axis=0, out=prior_counts[1:])

    cols = _evaluate(prior_counts, config.resolved_alpha(), spec, config.strategy)
    ln_k0 = math.log(config.k0)
    # sequential left fold, so f_t = f_{t-1} + v_t holds bit for bit
    f = np.cumsum(np.concatenate(([ln_k0], cols["stage_value"])))[1:]
    return Trajectory(
        config_echo=config.resolved(),
        k0=config.k0,
        draws=draws,
        f_cumulative=f,
        g_star_avg=float((f[-1] - ln_k0) / T),
        **cols,
    )


def average_growth(trajectory: Trajectory) -> float:
    return float((trajectory.f_cumulative[-1] - trajectory.ln_k0) / trajectory.t_horizon)


def capacity(h_star: float, h: float) -> float:
    return h_star - h


def order(h: float, h_star: float) -> float:
    if h_star <= 0:
        raise DegenerateMaxEntropy("order is undefined when the maximum entropy is zero")
    return 1.0 - h / h_star


def relative_entropy(h_true: float, h_hat: float) -> float:
    return abs(h_true - h_hat)
