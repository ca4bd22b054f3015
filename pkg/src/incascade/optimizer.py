"""Incentive allocation: cheapest policy reaching a cascade target, and largest
cascade affordable under a budget.

Both problems reduce to a scalar search over q (the cascade size is strictly
increasing in q when incentivized nodes are more likely to recommend) plus,
at fixed q, a linear program over nu_k = k p(k) phi(k) / (d q) that is solved
by filling capacity-limited "jars" in ascending order of cost per unit edge
weight mu_k = s_k(q) c_k / k.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .degree import IncentivePolicy
from .errors import ConvergenceError, InfeasibleTargetError
from .percolation import DEFAULT_TOL, PercolationModel, policy_cost, profile

log = logging.getLogger(__name__)

DEFAULT_EPS = 1e-6
MAX_BISECTIONS = 200
CAPACITY_TOL = 1e-9

BOUNDARY_CASES = ("none", "below_gamma_min", "at_gamma_max")


@dataclass(frozen=True)
class CostPlan:
    q_gamma: float
    nu: dict
    policy: IncentivePolicy
    expected_cost: float
    predicted_size: float
    boundary_case: str = "none"


@dataclass(frozen=True)
class SizePlan:
    q_opt: float
    policy: IncentivePolicy
    predicted_size: float
    expected_cost: float


def _require_monotone(model):
    if not model.params.alpha2 > model.params.alpha1:
        raise InfeasibleTargetError(
            "monotonicity assumption violated: alpha2 must exceed alpha1",
            boundary_case="monotonicity",
        )


def _positive_support(model):
    keep = model.dist.degrees >= 1
    return model.dist.degrees[keep], model.dist.probs[keep], keep


def find_q_gamma(model: PercolationModel, gamma: float, eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL) -> float:
    """Bisect for the q at which the expected cascade size equals ``gamma``."""
    _require_monotone(model)
    if eps <= 0:
        raise ValueError("eps must be positive")
    s_lo = profile(model, 0.0, tol=tol).size
    s_hi = profile(model, 1.0, tol=tol).size
    if gamma <= s_lo:
        raise InfeasibleTargetError(f"gamma={gamma} <= s(0)={s_lo}", boundary_case="below_gamma_min")
    if gamma >= s_hi:
        raise InfeasibleTargetError(f"gamma={gamma} >= s(1)={s_hi}", boundary_case="at_gamma_max")
    q1, q2 = 0.0, 1.0
    for _ in range(MAX_BISECTIONS):
        if abs(s_hi - s_lo) <= eps:
            return 0.5 * (q1 + q2)
        q_mp = 0.5 * (q1 + q2)
        if not q1 < q_mp < q2:
            # bracket is down to adjacent doubles: s(q) jumps across gamma here
            log.warning("cascade size jumps from %.6g to %.6g at q=%.17g; target falls in the gap", s_lo, s_hi, q2)
            return q2
        s_mp = profile(model, q_mp, tol=tol).size
        if s_mp < gamma:
            q1, s_lo = q_mp, s_mp
        else:
            q2, s_hi = q_mp, s_mp
    raise ConvergenceError(f"bisection for q_gamma did not converge in {MAX_BISECTIONS} steps", last=0.5 * (q1 + q2))


def _jar_fill(mu, capacity):
    # stable sort on (mu, degree): ties broken by ascending degree
    order = np.argsort(mu, kind="stable")
    nu = np.zeros_like(capacity)
    remaining = 1.0
    for j in order:
        if remaining <= 0:
            break
        take = min(remaining, capacity[j])
        nu[j] = take
        remaining -= take
    return nu


def _mu_and_capacity(model, q, s_k):
    degrees, probs, keep = _positive_support(model)
    mu = s_k[keep] * model.costs[keep] / degrees
    capacity = degrees * probs / (model.dist.mean * q)
    return degrees, mu, capacity


def solve_p2(model: PercolationModel, q_gamma: float, tol: float = DEFAULT_TOL, _s_k=None) -> dict[int, float]:
    """Greedy optimum of the fixed-q linear program over nu.

    Degrees are visited in ascending mu_k(q) and each jar is filled up to its
    capacity k p(k) / (d q) until unit mass has been placed.
    """
    if not 0.0 < q_gamma < 1.0:
        raise ValueError(f"q_gamma must lie in (0, 1), got {q_gamma}")
    s_k = profile(model, q_gamma, tol=tol).s_k if _s_k is None else _s_k
    degrees, mu, capacity = _mu_and_capacity(model, q_gamma, s_k)
    nu = _jar_fill(mu, capacity)
    return dict(zip(degrees.tolist(), nu.tolist()))


def p2_objective(model: PercolationModel, q: float, nu: dict, s_k=None, tol: float = DEFAULT_TOL) -> float:
    """d * q * sum_k nu_k mu_k(q)."""
    if s_k is None:
        s_k = profile(model, q, tol=tol).s_k
    degrees, mu, _ = _mu_and_capacity(model, q, s_k)
    total = math.fsum(nu.get(int(k), 0.0) * m for k, m in zip(degrees.tolist(), mu.tolist()))
    return model.dist.mean * q * total


def nu_to_phi(nu: dict, dist, q_gamma: float) -> IncentivePolicy:
    """Map a feasible nu back to per-degree incentive probabilities."""
    d_bar = dist.mean
    phi = {}
    for k, v in nu.items():
        k = int(k)
        pk = dist.p(k)
        if pk == 0.0 or k == 0:
            phi[k] = 0.0
            continue
        cap = k * pk / (d_bar * q_gamma)
        if v < -CAPACITY_TOL or v > cap * (1 + CAPACITY_TOL) + CAPACITY_TOL:
            raise ValueError(f"nu[{k}]={v} outside [0, {cap}]")
        phi[k] = min(max(v * d_bar * q_gamma / (k * pk), 0.0), 1.0)
    return IncentivePolicy(phi)


def _full_policy(model):
    return IncentivePolicy.constant(1.0, model.dist)


def minimize_cost(model: PercolationModel, gamma: float, eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL) -> CostPlan:
    """Cheapest incentive policy whose expected cascade size reaches ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    _require_monotone(model)
    low = profile(model, 0.0, tol=tol)
    if gamma <= low.size:
        zero = IncentivePolicy({int(k): 0.0 for k in model.dist.degrees})
        return CostPlan(0.0, {}, zero, 0.0, low.size, "below_gamma_min")
    high = profile(model, 1.0, tol=tol)
    if gamma > high.size:
        raise InfeasibleTargetError(
            f"infeasible target: gamma={gamma} exceeds s(1)={high.size}", boundary_case="above_gamma_max"
        )
    if gamma == high.size:
        full = _full_policy(model)
        cost = policy_cost(model, full.values_for(model.dist.degrees), high.s_k)
        degrees, probs, _ = _positive_support(model)
        nu = dict(zip(degrees.tolist(), (degrees * probs / model.dist.mean).tolist()))
        return CostPlan(1.0, nu, full, cost, high.size, "at_gamma_max")
    q_gamma = find_q_gamma(model, gamma, eps=eps, tol=tol)
    prof = profile(model, q_gamma, tol=tol)
    nu = solve_p2(model, q_gamma, _s_k=prof.s_k)
    policy = nu_to_phi(nu, model.dist, q_gamma)
    cost = p2_objective(model, q_gamma, nu, s_k=prof.s_k)
    return CostPlan(q_gamma, nu, policy, cost, prof.size, "none")


def maximize_cascade(model: PercolationModel, budget: float, eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL) -> SizePlan:
    """Largest expected cascade whose optimal incentive spend stays within ``budget``.

    Bisection keeps ``q1`` feasible and ``q2`` infeasible; the returned q is
    the feasible end so the budget is never exceeded.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    _require_monotone(model)
    high = profile(model, 1.0, tol=tol)
    full = _full_policy(model)
    full_cost = policy_cost(model, full.values_for(model.dist.degrees), high.s_k)
    if full_cost <= budget:
        return SizePlan(1.0, full, high.size, full_cost)

    low = profile(model, 0.0, tol=tol)
    q1, q2 = 0.0, 1.0
    s1, s2 = low.size, high.size
    best = None
    for _ in range(MAX_BISECTIONS):
        if abs(s1 - s2) <= eps:
            break
        q_mp = 0.5 * (q1 + q2)
        if not q1 < q_mp < q2:
            break
        prof = profile(model, q_mp, tol=tol)
        nu = solve_p2(model, q_mp, _s_k=prof.s_k)
        cost = p2_objective(model, q_mp, nu, s_k=prof.s_k)
        if cost > budget:
            q2, s2 = q_mp, prof.size
        else:
            q1, s1 = q_mp, prof.size
            best = (q_mp, nu, prof, cost)
    else:
        raise ConvergenceError(f"budget bisection did not converge in {MAX_BISECTIONS} steps", last=q1)

    if best is None:
        zero = IncentivePolicy({int(k): 0.0 for k in model.dist.degrees})
        return SizePlan(0.0, zero, low.size, 0.0)
    q_opt, nu, prof, cost = best
    policy = nu_to_phi(nu, model.dist, q_opt)
    return SizePlan(q_opt, policy, prof.size, cost)
