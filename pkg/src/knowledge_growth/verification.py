"""Fuzzed cross-check of the closed-form solver against the lattice oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import make_rng
from .optimizer import (
    brute_force_relevance,
    expected_growth,
    identity_decomposition,
    kkt_residual,
    solve_relevance,
)

FEASIBILITY_TOL = 1e-12
KKT_TOL = 1e-9
IDENTITY_TOL = 1e-10


def random_instance(rng: np.random.Generator, m_min: int, m_max: int, y_lo=0.1, y_hi=10.0):
    """Uniform-simplex probabilities and log-uniform packet values."""
    m = int(rng.integers(m_min, m_max + 1))
    p = rng.dirichlet(np.ones(m))
    y = np.exp(rng.uniform(math.log(y_lo), math.log(y_hi), size=m))
    return p, y


@dataclass
class InstanceCheck:
    p: np.ndarray
    y: np.ndarray
    feasibility: float
    min_r: float
    kkt: float
    identity: float
    stage_value: float
    closed_value: float
    lattice_value: float

    @property
    def gap(self) -> float:
        return self.closed_value - self.lattice_value

    def passed(self, tol: float) -> bool:
        return (
            self.feasibility <= FEASIBILITY_TOL
            and self.min_r >= 0.0
            and self.kkt <= KKT_TOL
            and self.identity <= IDENTITY_TOL
            and -FEASIBILITY_TOL <= self.gap <= tol
            and self.stage_value >= self.lattice_value - tol
        )


def check_instance(p, y, resolution: int) -> InstanceCheck:
    sol = solve_relevance(p, y)
    _, lattice_value = brute_force_relevance(p, y, resolution)
    return InstanceCheck(
        p=np.asarray(p),
        y=np.asarray(y),
        feasibility=abs(float(sol.r.sum()) - 1.0),
        min_r=float(sol.r.min()),
        kkt=kkt_residual(p, y, sol),
        identity=abs(identity_decomposition(sol, y).combined - sol.stage_value),
        stage_value=sol.stage_value,
        # lattice searches the unrenormalized objective; renormalizing only rescales it
        closed_value=expected_growth(p, y, sol.r),
        lattice_value=lattice_value,
    )


@dataclass
class VerifyReport:
    tol: float
    checks: list[InstanceCheck] = field(default_factory=list)

    @property
    def failures(self) -> list[InstanceCheck]:
        return [c for c in self.checks if not c.passed(self.tol)]

    @property
    def ok(self) -> bool:
        return not self.failures

    def worst(self) -> dict:
        if not self.checks:
            return {}
        return {
            "feasibility": max(c.feasibility for c in self.checks),
            "kkt": max(c.kkt for c in self.checks),
            "identity": max(c.identity for c in self.checks),
            "max_gap": max(c.gap for c in self.checks),
            "min_gap": min(c.gap for c in self.checks),
        }


def verify(n_instances: int, m_max: int, resolution: int, tol: float, seed: int = 0) -> VerifyReport:
    rng = make_rng(seed)
    report = VerifyReport(tol)
    for _ in range(n_instances):
        p, y = random_instance(rng, 2, m_max)
        report.checks.append(check_instance(p, y, resolution))
    return report
