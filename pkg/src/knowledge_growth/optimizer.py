"""Single-stage log-growth maximization over the relevance simplex.

Maximize sum_i q_i ln(1 + r_i y_i) subject to r >= 0, sum r = 1. The optimum
has a threshold structure: packet types sorted by q_i * y_i enter the active
set in that order, and on the active set

    r_i = q_i (1 + sum_j 1/y_j) - 1/y_i

with q renormalized over the active set.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .environment import entropy
from .errors import DomainError, EmptySubset, InstanceTooLarge, LengthMismatch

NEG_TOL = 1e-12
MAX_LATTICE_CELLS = 2 * 10**8
MAX_ENUMERATION = 5 * 10**6


@dataclass(frozen=True, eq=False)
class RelevanceSolution:
    active_set: tuple[int, ...]
    r: np.ndarray
    q_renormalized: np.ndarray
    multiplier: float
    stage_value: float
    k: np.ndarray

    @property
    def active_mask(self) -> np.ndarray:
        mask = np.zeros(self.r.size, dtype=bool)
        mask[list(self.active_set)] = True
        return mask


@dataclass(frozen=True)
class IdentityTerms:
    h_star: float
    h_hat: float
    e_ln_y: float
    phi: float
    combined: float


def renormalize(p_hat, subset) -> np.ndarray:
    p_hat = np.asarray(p_hat, dtype=float)
    idx = list(subset)
    if not idx:
        raise EmptySubset("cannot renormalize over an empty subset")
    sub = p_hat[idx]
    return sub / sub.sum()


def solve_rows(P: np.ndarray, y: np.ndarray):
    """Vectorized solver: one instance per row of ``P`` (shape (n, m)), shared values ``y``.

    Returns ``(r, active, multiplier, stage_value)`` with shapes (n, m), (n, m),
    (n,), (n,). ``multiplier`` is on the renormalized scale, 1 / (1 + sum_A 1/y).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    y = np.asarray(y, dtype=float)
    n, m = P.shape
    inv_y = 1.0 / y

    # stable sort keeps lower index first on ties
    order = np.argsort(-(P * y), axis=1, kind="stable")
    p_sorted = np.take_along_axis(P, order, axis=1)
    iy_sorted = inv_y[order]
    p_cum = np.cumsum(p_sorted, axis=1)
    s_cum = np.cumsum(iy_sorted, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r_last = p_sorted * (1.0 + s_cum) / p_cum - iy_sorted
    ok = r_last >= -NEG_TOL
    size = np.cumprod(ok, axis=1).sum(axis=1)

    rows = np.arange(n)
    p_active = p_cum[rows, size - 1]
    s_active = s_cum[rows, size - 1]
    active = np.zeros((n, m), dtype=bool)
    np.put_along_axis(active, order, np.arange(m)[None, :] < size[:, None], axis=1)

    q = np.where(active, P / p_active[:, None], 0.0)
    r = np.where(active, q * (1.0 + s_active)[:, None] - inv_y, 0.0)
    r[size == 1] = active[size == 1]  # exact 1 for a lone active type
    clamped = (r < 0).any(axis=1)
    if clamped.any():
        r[clamped] = np.maximum(r[clamped], 0.0)
        r[clamped] /= r[clamped].sum(axis=1, keepdims=True)

    terms = np.where(active, q * np.log1p(r * y), 0.0)
    # summing in priority order makes the value invariant to relabeling the types
    value = np.take_along_axis(terms, order, axis=1).sum(axis=1)
    return r, active, 1.0 / (1.0 + s_active), value


def _check_instance(p_hat, y) -> tuple[np.ndarray, np.ndarray]:
    p_hat = np.asarray(p_hat, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if p_hat.size != y.size:
        raise LengthMismatch(f"{p_hat.size} probabilities vs {y.size} values")
    if p_hat.size == 0:
        raise DomainError("empty instance")
    if not np.all(np.isfinite(p_hat)) or np.any(p_hat < 0) or abs(p_hat.sum() - 1.0) > 1e-9:
        raise DomainError(f"p_hat is not a probability vector: {p_hat.tolist()}")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise DomainError(f"packet values must be positive: {y.tolist()}")
    return p_hat, y


def make_solution(dist, y, r, active, multiplier, stage_value) -> RelevanceSolution:
    idx = tuple(int(i) for i in np.flatnonzero(active))
    q = np.asarray(dist, dtype=float)[list(idx)]
    return RelevanceSolution(
        active_set=idx,
        r=np.asarray(r, dtype=float),
        q_renormalized=q / q.sum(),
        multiplier=float(multiplier),
        stage_value=float(stage_value),
        k=np.asarray(r, dtype=float) * np.asarray(y, dtype=float),
    )


def solve_relevance(p_hat, y) -> RelevanceSolution:
    p_hat, y = _check_instance(p_hat, y)
    r, active, lam, value = solve_rows(p_hat[None, :], y)
    return make_solution(p_hat, y, r[0], active[0], lam[0], value[0])


def kkt_residual(p_hat, y, solution: RelevanceSolution) -> float:
    """Largest violation of the stationarity / complementary-slackness conditions."""
    p_hat = np.asarray(p_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = solution.active_mask
    q = p_hat / p_hat[mask].sum()
    lam = solution.multiplier
    grad = q * y / (1.0 + solution.r * y)
    res_active = np.abs(grad[mask] - lam)
    res_inactive = np.maximum(q[~mask] * y[~mask] - lam, 0.0)
    return float(max(res_active.max(initial=0.0), res_inactive.max(initial=0.0)))


def expected_growth(q, y, r) -> float:
    q = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.asarray(r, dtype=float)
    if not (q.shape == y.shape == r.shape):
        raise LengthMismatch("q, y and r must have equal length")
    if np.any(r < 0):
        raise DomainError("relevance must be nonnegative")
    growth = 1.0 + r * y
    if np.any(growth <= 0):
        raise DomainError("1 + r*y must be positive")
    return float(np.sum(q * np.log(growth)))


def identity_decomposition(solution: RelevanceSolution, y) -> IdentityTerms:
    """Entropy form of the optimal stage value.

    stage_value = (ln|A| - H(q)) + sum q ln y + ln(1/|A| + 1/phi),
    with phi the harmonic mean of the active packet values.
    """
    y_act = np.asarray(y, dtype=float)[list(solution.active_set)]
    q = solution.q_renormalized
    size = len(solution.active_set)
    h_star = math.log(size)
    h_hat = entropy(q)
    e_ln_y = float(np.sum(q * np.log(y_act)))
    phi = size / float(np.sum(1.0 / y_act))
    combined = (h_star - h_hat) + e_ln_y + math.log(1.0 / size + 1.0 / phi)
    return IdentityTerms(h_star, h_hat, e_ln_y, phi, combined)


def brute_force_relevance(q, y, resolution: int, method: str = "dp"):
    """Best relevance vector on the simplex lattice with spacing ``1/resolution``.

    ``method="dp"`` searches the lattice exactly with a max-plus recursion over
    packet types (the objective is separable); ``method="enumerate"`` walks every
    lattice point and is only practical for small instances. Returns
    ``(r_grid, value_grid)``.
    """
    q = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    if q.shape != y.shape:
        raise LengthMismatch("q and y must have equal length")
    if resolution < 1:
        raise DomainError("resolution must be positive")
    m = q.size
    grid = np.arange(resolution + 1) / resolution
    gains = q[:, None] * np.log1p(grid[None, :] * y[:, None])

    if method == "enumerate":
        if math.comb(resolution + m - 1, m - 1) > MAX_ENUMERATION:
            raise InstanceTooLarge("lattice too large for enumeration")
        best_units, best_val = None, -np.inf
        for cuts in itertools.combinations(range(resolution + m - 1), m - 1):
            bounds = (-1,) + cuts + (resolution + m - 1,)
            units = [bounds[i + 1] - bounds[i] - 1 for i in range(m)]
            val = sum(gains[i, u] for i, u in enumerate(units))
            if val > best_val:
                best_units, best_val = units, val
        return np.array(best_units) / resolution, float(best_val)

    if method != "dp":
        raise ValueError(f"unknown method {method!r}")
    if m * (resolution + 1) ** 2 > MAX_LATTICE_CELLS:
        raise InstanceTooLarge("lattice too large")

    units = np.arange(resolution + 1)
    rest = units[:, None] - units[None, :]
    feasible = rest >= 0
    rest = np.where(feasible, rest, 0)
    best = gains[0].copy()
    choices = []
    for i in range(1, m):
        cand = np.where(feasible, best[rest] + gains[i][None, :], -np.inf)
        pick = cand.argmax(axis=1)
        choices.append(pick)
        best = cand[units, pick]

    alloc = np.zeros(m, dtype=int)
    left = resolution
    for i in range(m - 1, 0, -1):
        alloc[i] = choices[i - 1][left]
        left -= alloc[i]
    alloc[0] = left
    return alloc / resolution, float(np.sum(gains[np.arange(m), alloc]))


def deterministic_growth(k0: float, k: float, t_stages: int) -> tuple[float, float]:
    """Knowledge after ``t_stages`` of constant growth ``k``, and the log rate ln(1+k)."""
    if k0 <= 0 or 1.0 + k <= 0 or t_stages < 1:
        raise DomainError("need k0 > 0, 1 + k > 0 and t_stages >= 1")
    return k0 * (1.0 + k) ** t_stages, math.log(1.0 + k)
