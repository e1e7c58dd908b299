import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dirichlet_instances
from knowledge_growth import (
    brute_force_relevance,
    deterministic_growth,
    expected_growth,
    identity_decomposition,
    kkt_residual,
    renormalize,
    solve_relevance,
)
from knowledge_growth.errors import DomainError, EmptySubset, InstanceTooLarge


def instances():
    weights = st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=16)
    return weights.flatmap(
        lambda w: st.tuples(
            st.just(np.array(w) / np.sum(w)),
            st.lists(st.floats(0.1, 10.0), min_size=len(w), max_size=len(w)).map(np.array),
        )
    )


# renormalize

def test_renormalize():
    assert renormalize([0.2, 0.3, 0.5], [0, 2]) == pytest.approx([2 / 7, 5 / 7], abs=1e-15)
    assert renormalize([0.25] * 4, range(4)).tolist() == [0.25] * 4
    assert renormalize([0.9, 0.1], [1]).tolist() == [1.0]
    with pytest.raises(EmptySubset):
        renormalize([0.5, 0.5], [])


# solve_relevance, worked examples

def test_symmetric_split():
    sol = solve_relevance([0.5, 0.5], [1, 1])
    assert sol.active_set == (0, 1)
    assert sol.r == pytest.approx([0.5, 0.5], abs=1e-15)
    assert sol.stage_value == pytest.approx(math.log(1.5), abs=1e-15)


def test_single_type():
    sol = solve_relevance([1.0], [5.0])
    assert sol.r.tolist() == [1.0]
    assert sol.stage_value == pytest.approx(math.log(6.0), abs=1e-15)


def test_low_probability_type_dropped():
    # unconstrained formula gives r = [1.7, -0.7]; the second type leaves the active set
    sol = solve_relevance([0.9, 0.1], [1, 1])
    assert sol.active_set == (0,)
    assert sol.r.tolist() == [1.0, 0.0]
    assert sol.q_renormalized.tolist() == [1.0]
    assert sol.stage_value == pytest.approx(math.log(2), abs=1e-15)
    r_grid, _ = brute_force_relevance([0.9, 0.1], [1, 1], 100)
    assert r_grid.tolist() == [1.0, 0.0]


def test_unequal_values():
    sol = solve_relevance([0.5, 0.5], [4, 1])
    assert sol.active_set == (0, 1)
    assert sol.r == pytest.approx([0.875, 0.125], abs=1e-15)
    assert sol.k == pytest.approx([3.5, 0.125], abs=1e-15)
    r_grid, _ = brute_force_relevance([0.5, 0.5], [4, 1], 200)
    assert r_grid == pytest.approx([0.875, 0.125], abs=1 / 200)


def test_rejects_bad_input():
    with pytest.raises(DomainError):
        solve_relevance([0.5, 0.6], [1, 1])
    with pytest.raises(DomainError):
        solve_relevance([0.5, 0.5], [1, 0])


def test_ties_broken_by_lower_index():
    # equal p*y on the boundary: both calls must choose the same active set
    a = solve_relevance([0.4, 0.3, 0.3], [1.0, 1.0, 1.0])
    b = solve_relevance([0.4, 0.3, 0.3], [1.0, 1.0, 1.0])
    assert a.active_set == b.active_set
    assert np.array_equal(a.r, b.r)


# expected_growth

def test_expected_growth():
    assert expected_growth([0.5, 0.5], [1, 1], [0.5, 0.5]) == pytest.approx(0.4054651, abs=1e-7)
    assert expected_growth([0.3, 0.7], [2, 5], [0.0, 0.0]) == 0.0
    assert expected_growth([1.0], [math.e - 1], [1.0]) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        expected_growth([1.0], [1.0], [-0.5])


# identity decomposition

def test_identity_symmetric():
    sol = solve_relevance([0.5, 0.5], [1, 1])
    terms = identity_decomposition(sol, [1, 1])
    assert terms.h_star == pytest.approx(math.log(2))
    assert terms.h_hat == pytest.approx(math.log(2))
    assert terms.e_ln_y == 0.0
    assert terms.phi == 1.0
    assert terms.combined == pytest.approx(math.log(1.5), abs=1e-15)


@pytest.mark.parametrize("yi", [0.3, 1.0, 7.5])
def test_identity_singleton(yi):
    sol = solve_relevance([1.0], [yi])
    terms = identity_decomposition(sol, [yi])
    assert terms.h_star == 0.0 and terms.h_hat == 0.0
    assert terms.combined == pytest.approx(math.log1p(yi), abs=1e-14)


def test_identity_matches_solver():
    sol = solve_relevance([0.5, 0.5], [4, 1])
    assert abs(identity_decomposition(sol, [4, 1]).combined - sol.stage_value) <= 1e-10


def test_phi_is_harmonic_mean():
    sol = solve_relevance([0.4, 0.3, 0.3], [4.0, 3.0, 2.0])
    terms = identity_decomposition(sol, [4.0, 3.0, 2.0])
    assert sol.active_set == (0, 1, 2)
    assert terms.phi == pytest.approx(3 / (0.25 + 1 / 3 + 0.5), abs=1e-15)


# lattice oracle

def test_brute_force_symmetric():
    r, v = brute_force_relevance([0.5, 0.5], [1, 1], 100)
    assert r.tolist() == [0.5, 0.5]
    assert v == pytest.approx(math.log(1.5), abs=1e-15)


@pytest.mark.parametrize("p, y", list(dirichlet_instances(5, 12, 2, 4)))
def test_dp_lattice_equals_enumeration(p, y):
    _, v_dp = brute_force_relevance(p, y, 24)
    _, v_enum = brute_force_relevance(p, y, 24, method="enumerate")
    assert v_dp == pytest.approx(v_enum, abs=1e-14)


def test_brute_force_guard():
    with pytest.raises(InstanceTooLarge):
        brute_force_relevance(np.full(64, 1 / 64), np.ones(64), 2000)
    with pytest.raises(InstanceTooLarge):
        brute_force_relevance(np.full(6, 1 / 6), np.ones(6), 300, method="enumerate")


@pytest.mark.parametrize("p, y", list(dirichlet_instances(17, 40, 2, 4)))
def test_closed_form_dominates_lattice(p, y):
    sol = solve_relevance(p, y)
    _, lattice = brute_force_relevance(p, y, 300)
    closed = expected_growth(p, y, sol.r)
    assert closed >= lattice - 1e-12
    assert closed - lattice <= 5e-3
    assert sol.stage_value >= lattice - 1e-12


# deterministic growth

def test_deterministic_growth():
    k, g = deterministic_growth(1.0, 0.05, 10)
    assert k == pytest.approx(1.6288946, abs=1e-7)
    assert g == pytest.approx(math.log(1.05), rel=1e-15)
    assert deterministic_growth(1.0, 0.0, 37) == (1.0, 0.0)
    k, g = deterministic_growth(2.0, 1.0, 3)
    assert k == 16.0 and g == pytest.approx(math.log(2), rel=1e-15)
    assert g == pytest.approx(math.log(k / 2.0) / 3, rel=1e-15)
    with pytest.raises(DomainError):
        deterministic_growth(1.0, -1.0, 3)


# properties

def test_fuzzed_feasibility_and_kkt():
    rng = np.random.default_rng(99)
    for _ in range(10_000):
        m = int(rng.integers(1, 65))
        p = rng.dirichlet(np.full(m, rng.uniform(0.2, 3.0)))
        p = np.maximum(p, 1e-300)
        p /= p.sum()
        y = np.exp(rng.uniform(np.log(0.05), np.log(50.0), size=m))
        sol = solve_relevance(p, y)
        assert np.all(sol.r >= 0)
        assert abs(sol.r.sum() - 1) <= 1e-12
        assert np.all(sol.r[~sol.active_mask] == 0)
        assert abs(sol.q_renormalized.sum() - 1) <= 1e-12
        assert kkt_residual(p, y, sol) <= 1e-9


@given(instances())
def test_decomposition_identity(inst):
    p, y = inst
    sol = solve_relevance(p, y)
    assert abs(identity_decomposition(sol, y).combined - sol.stage_value) <= 1e-10


@given(instances(), st.randoms(use_true_random=False))
def test_permutation_equivariance(inst, rnd):
    p, y = inst
    perm = list(range(p.size))
    rnd.shuffle(perm)
    a = solve_relevance(p, y)
    b = solve_relevance(p[perm], y[perm])
    assert b.stage_value == a.stage_value
    assert np.array_equal(b.r, a.r[perm])


@given(instances())
def test_beats_feasible_baselines(inst):
    p, y = inst
    sol = solve_relevance(p, y)
    full = expected_growth(p, y, sol.r)
    m = p.size
    assert full >= expected_growth(p, y, np.full(m, 1 / m)) - 1e-12
    for i in range(m):
        assert full >= expected_growth(p, y, np.eye(m)[i]) - 1e-12


@given(st.integers(1, 12).flatmap(lambda m: st.tuples(st.integers(0, m - 1), st.lists(st.floats(0.1, 10), min_size=m, max_size=m))))
def test_certainty_collapse(args):
    i, y = args
    p = np.zeros(len(y))
    p[i] = 1.0
    sol = solve_relevance(p, y)
    assert sol.active_set == (i,)
    assert np.array_equal(sol.r, np.eye(len(y))[i])
    assert sol.stage_value == pytest.approx(math.log1p(y[i]), abs=1e-15)
