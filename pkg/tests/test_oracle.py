import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incascade import (
    CampaignParams,
    DegreeDistribution,
    IncentivePolicy,
    ParametricThresholds,
    PercolationModel,
    cascade_fraction,
    eval_f,
    expected_cost,
    minimize_cost,
)
from incascade.oracle import (
    convolution_tail,
    correlated_tree_prediction,
    enumerate_p2,
    eval_f_direct,
    grid_search_min_cost,
)

from conftest import random_small_dist


def test_convolution_tail_trivial():
    assert convolution_tail(5, 2, 0, 0.3, 0.6) == pytest.approx(1.0)
    u = 0.37
    assert convolution_tail(2, 2, 2, 0.1, u) == pytest.approx(u * u)


def test_convolution_tail_k2_bounds():
    with pytest.raises(ValueError):
        convolution_tail(3, 4, 1, 0.1, 0.2)


@given(st.integers(1, 12), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_mixture_over_k2_collapses_to_one_binomial(k, q, u, m_frac):
    m = max(1, math.ceil(m_frac * k))
    p1, p2 = 0.1 * u, 0.9 * u
    mixed = sum(math.comb(k, j) * q**j * (1 - q) ** (k - j) * convolution_tail(k, j, m, p1, p2) for j in range(k + 1))
    p = q * p2 + (1 - q) * p1
    direct = sum(math.comb(k, i) * p**i * (1 - p) ** (k - i) for i in range(m, k + 1))
    assert mixed == pytest.approx(direct, abs=1e-12)


def test_eval_f_direct_at_zero_is_zealous():
    m = PercolationModel(DegreeDistribution({2: 0.5, 5: 0.5}), ParametricThresholds(0.25, 0.5), CampaignParams(0.1, 0.9))
    assert eval_f_direct(m, 0.3, 0.0) == pytest.approx(0.25)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(0, 1), st.floats(0, 1))
def test_direct_matches_fast(seed, q, u):
    rng = np.random.default_rng(seed)
    m = PercolationModel(random_small_dist(rng, 3, 25), ParametricThresholds(0.3, 0.5), CampaignParams(0.2, 0.7))
    assert eval_f_direct(m, q, u) == pytest.approx(eval_f(m, q, u), abs=1e-10)


def test_enumerate_single_degree():
    m = PercolationModel(DegreeDistribution({4: 1.0}), ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9))
    assert enumerate_p2(m, 0.5) == {4: 1.0}


def test_enumerate_rejects_large_support():
    m = PercolationModel(DegreeDistribution({k: 1 / 7 for k in range(1, 8)}, normalize=True), ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9))
    with pytest.raises(ValueError, match="small instances"):
        enumerate_p2(m, 0.5)


def test_enumerate_lattice_check_passes():
    m = PercolationModel(DegreeDistribution({1: 0.4, 3: 0.35, 6: 0.25}), ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9))
    assert math.fsum(enumerate_p2(m, 0.6, grid=20).values()) == pytest.approx(1.0)


def test_grid_search_baseline_free():
    m = PercolationModel(DegreeDistribution({2: 0.5, 4: 0.5}), ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9))
    cost, pol = grid_search_min_cost(m, 0.0, step=0.25)
    assert cost == 0.0
    assert set(pol.phi.values()) <= {0.0}


def test_grid_search_unreachable():
    m = PercolationModel(DegreeDistribution({2: 0.5, 4: 0.5}), ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9))
    with pytest.raises(ValueError, match="unreachable"):
        grid_search_min_cost(m, 0.99, step=0.5)


def test_grid_search_single_degree_agrees_with_pipeline():
    m = PercolationModel(DegreeDistribution({4: 1.0}), ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9))
    gamma = 0.5 * (cascade_fraction(m, 0) + cascade_fraction(m, 1))
    grid_cost, _ = grid_search_min_cost(m, gamma, step=0.01)
    plan = minimize_cost(m, gamma)
    assert plan.expected_cost <= grid_cost + 1e-9
    # one grid step above the continuous optimum is feasible and on the grid
    rounded = IncentivePolicy({4: math.ceil(plan.policy(4) * 100 - 1e-9) / 100})
    assert grid_cost <= expected_cost(m, rounded) + 1e-9


def test_grid_optimum_nonincreasing_as_step_shrinks():
    m = PercolationModel(DegreeDistribution({1: 0.4, 3: 0.6}), ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9))
    gamma = 0.5 * (cascade_fraction(m, 0) + cascade_fraction(m, 1))
    coarse, _ = grid_search_min_cost(m, gamma, step=0.1)
    fine, _ = grid_search_min_cost(m, gamma, step=0.05)
    assert fine <= coarse + 1e-12


def test_correlated_prediction_equals_model_for_uniform_policy():
    m = PercolationModel(DegreeDistribution({2: 0.3, 5: 0.4, 9: 0.3}), ParametricThresholds(0.3, 0.5), CampaignParams(0.1, 0.9))
    pol = IncentivePolicy.constant(0.4, m.dist)
    size, cost = correlated_tree_prediction(m, pol)
    assert size == pytest.approx(cascade_fraction(m, 0.4), abs=1e-9)
    assert cost == pytest.approx(expected_cost(m, pol), abs=1e-9)
