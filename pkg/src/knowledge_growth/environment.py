"""Hidden categorical environment emitting typed information-packets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, NonPositiveValue, NonSimplexProbabilities

SIMPLEX_TOL = 1e-12


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def entropy(dist) -> float:
    """Shannon entropy in nats, with 0 ln 0 = 0."""
    d = np.asarray(dist, dtype=float)
    nz = d[d > 0]
    return float(-np.sum(nz * np.log(nz)))


@dataclass(frozen=True, eq=False)
class EnvironmentSpec:
    """Packet-type count ``m``, true emission probabilities ``p`` and packet values ``y`` (nats).

    Build through :func:`make_environment`, which validates and freezes the arrays.
    """

    m: int
    p: np.ndarray
    y: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, EnvironmentSpec):
            return NotImplemented
        return (
            self.m == other.m
            and np.array_equal(self.p, other.p)
            and np.array_equal(self.y, other.y)
        )

    def __hash__(self):
        return hash((self.m, self.p.tobytes(), self.y.tobytes()))


@dataclass(frozen=True, eq=False)
class StageObservation:
    stage: int
    draws: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, StageObservation):
            return NotImplemented
        return self.stage == other.stage and np.array_equal(self.draws, other.draws)


def make_environment(m, p, y) -> EnvironmentSpec:
    p = np.asarray(p, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if int(m) != m or m < 1:
        raise LengthMismatch(f"m must be a positive integer, got {m!r}")
    m = int(m)
    if p.size != m or y.size != m:
        raise LengthMismatch(f"expected {m} probabilities and values, got {p.size} and {y.size}")
    if not np.all(np.isfinite(p)) or np.any(p <= 0) or np.any(p > 1):
        raise NonSimplexProbabilities(f"probabilities must lie in (0, 1]: {p.tolist()}")
    total = p.sum()
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise NonSimplexProbabilities(f"probabilities sum to {total!r}, not 1")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise NonPositiveValue(f"packet values must be strictly positive: {y.tolist()}")
    return EnvironmentSpec(m, _readonly(p / total), _readonly(y))


def _cdf(p: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    return cdf


def _categorical_counts(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    # inverse-cdf on uniforms; last axis of u indexes draws within a stage
    m = cdf.size
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), m - 1)
    if u.ndim == 1:
        return np.bincount(idx, minlength=m)
    rows = np.repeat(np.arange(u.shape[0]), u.shape[1])
    out = np.zeros((u.shape[0], m), dtype=np.int64)
    np.add.at(out, (rows, idx.ravel()), 1)
    return out


def sample_stage(
    spec: EnvironmentSpec,
    rng: np.random.Generator,
    draws_per_stage: int = 1,
    stage: int = 0,
) -> StageObservation:
    """Draw one stage's packets; consumes exactly ``draws_per_stage`` uniforms from ``rng``."""
    if draws_per_stage < 1:
        raise ValueError("draws_per_stage must be positive")
    u = rng.random(draws_per_stage)
    return StageObservation(stage, _categorical_counts(_cdf(spec.p), u))


def sample_stages(
    spec: EnvironmentSpec,
    rng: np.random.Generator,
    t_stages: int,
    draws_per_stage: int = 1,
) -> np.ndarray:
    """Counts for ``t_stages`` consecutive stages as a (T, m) array.

    Consumes the generator stream identically to ``t_stages`` calls of
    :func:`sample_stage`, so both paths give the same draws for a seed.
    """
    if draws_per_stage < 1:
        raise ValueError("draws_per_stage must be positive")
    u = rng.random(t_stages * draws_per_stage).reshape(t_stages, draws_per_stage)
    return _categorical_counts(_cdf(spec.p), u)


def expected_counts(spec: EnvironmentSpec, t: float) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return t * spec.p


def true_entropy(spec: EnvironmentSpec) -> float:
    return entropy(spec.p)
