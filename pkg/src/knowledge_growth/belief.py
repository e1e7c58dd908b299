"""Dirichlet-multinomial belief over packet-type probabilities.

The state carries only the prior widths and cumulative counts, which is all
the history the posterior mean ever needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import StageObservation, entropy
from .errors import LengthMismatch, NonPositiveAlpha, NonSimplexProbabilities, StageOutOfOrder

LAPLACE_ALPHA = 1.0


@dataclass(frozen=True, eq=False)
class BeliefState:
    alpha: np.ndarray
    counts: np.ndarray
    stage: int = 0
    total_draws: int = 0

    @property
    def m(self) -> int:
        return self.alpha.size

    def posterior(self) -> np.ndarray:
        return posterior(self)

    def __eq__(self, other):
        if not isinstance(other, BeliefState):
            return NotImplemented
        return (
            np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.counts, other.counts)
            and self.stage == other.stage
            and self.total_draws == other.total_draws
        )


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def init_carnap(alpha) -> BeliefState:
    alpha = np.array(alpha, dtype=float).ravel()
    if alpha.size == 0 or not np.all(np.isfinite(alpha)) or np.any(alpha <= 0):
        raise NonPositiveAlpha(f"Carnap widths must be positive: {alpha.tolist()}")
    return BeliefState(_frozen(alpha), _frozen(np.zeros(alpha.size, dtype=np.int64)))


def init_laplace(m: int) -> BeliefState:
    if m < 1:
        raise ValueError("m must be positive")
    return init_carnap(np.full(m, LAPLACE_ALPHA))


def observe(state: BeliefState, obs: StageObservation) -> BeliefState:
    draws = np.asarray(obs.draws, dtype=np.int64).ravel()
    if draws.size != state.m:
        raise LengthMismatch(f"observation has {draws.size} types, belief has {state.m}")
    if np.any(draws < 0):
        raise ValueError("draw counts must be nonnegative")
    if obs.stage != state.stage:
        raise StageOutOfOrder(f"belief is at stage {state.stage}, observation is for {obs.stage}")
    return BeliefState(
        state.alpha,
        _frozen(state.counts + draws),
        state.stage + 1,
        state.total_draws + int(draws.sum()),
    )


def posterior(state: BeliefState) -> np.ndarray:
    # denominator uses total draws, which equals the stage index at one draw per stage
    return (state.counts + state.alpha) / (state.total_draws + state.alpha.sum())


def subjective_entropy(dist) -> float:
    d = np.asarray(dist, dtype=float)
    if np.any(d < 0) or abs(d.sum() - 1.0) > 1e-9:
        raise NonSimplexProbabilities(f"not a probability vector: {d.tolist()}")
    return entropy(d)
