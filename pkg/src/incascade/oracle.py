"""Brute-force reference implementations for small instances.

These deliberately avoid the fast paths they are used to check: the
self-consistency function is evaluated as the literal triple sum over the
number of incentivized neighbours and the two-binomial convolution, the
fixed-q linear program is solved by enumerating vertices, and the cost
minimization is checked by a grid scan over policies.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .degree import IncentivePolicy, edge_type2_probability
from .percolation import PercolationModel, profile

MAX_ENUM_SUPPORT = 6
MAX_GRID_SUPPORT = 3


def _binom_pmf(n, p):
    return np.array([math.comb(n, i) * p**i * (1.0 - p) ** (n - i) for i in range(n + 1)])


def convolution_tail(k: int, k2: int, m: int, p1: float, p2: float) -> float:
    """P[X + Y >= m] with X ~ Bin(k2, p2), Y ~ Bin(k - k2, p1), by full enumeration."""
    if not 0 <= k2 <= k:
        raise ValueError("need 0 <= k2 <= k")
    x = _binom_pmf(k2, p2)
    y = _binom_pmf(k - k2, p1)
    joint = np.outer(x, y)
    l, lp = np.indices(joint.shape)
    return float(joint[(l + lp) >= m].sum())


def eval_f_direct(model: PercolationModel, q: float, u: float) -> float:
    dist, th, pa = model.dist, model.thresholds, model.params
    d_bar = float(np.dot(dist.degrees, dist.probs))
    total = 0.0
    for k_deg, p in zip(dist.degrees.tolist(), dist.probs.tolist()):
        if k_deg < 1:
            continue
        k = k_deg - 1
        p_ex = k_deg * p / d_bar
        ms, ps = th.support(k_deg)
        for m, pm in zip(ms.tolist(), ps.tolist()):
            if m == 0:
                total += p_ex * pm
                continue
            if k < 1:
                continue
            inner = 0.0
            for k2 in range(k + 1):
                mix = math.comb(k, k2) * q**k2 * (1.0 - q) ** (k - k2)
                inner += mix * convolution_tail(k, k2, m, pa.alpha1 * u, pa.alpha2 * u)
            total += p_ex * pm * inner
    return total


def _mu(model, q):
    prof = profile(model, q)
    keep = model.dist.degrees >= 1
    degrees = model.dist.degrees[keep]
    mu = prof.s_k[keep] * model.params.cost_array(degrees) / degrees
    cap = degrees * model.dist.probs[keep] / (float(np.dot(model.dist.degrees, model.dist.probs)) * q)
    return degrees.tolist(), mu.tolist(), cap.tolist()


def _objective(d_bar, q, mu, nu):
    return d_bar * q * sum(n * m for n, m in zip(nu, mu))


def enumerate_p2(model: PercolationModel, q_gamma: float, grid: int = 0) -> dict[int, float]:
    """Exact optimum of the fixed-q program by vertex enumeration.

    Every vertex of {sum nu = 1, 0 <= nu_k <= cap_k} fills some jars to
    capacity in some order and leaves at most one jar fractional, so filling
    jars greedily along every permutation of the support visits them all.
    With ``grid > 0`` the vertex optimum is additionally checked against a
    lattice of feasible points with that many steps per coordinate.
    """
    degrees, mu, cap = _mu(model, q_gamma)
    if len(degrees) > MAX_ENUM_SUPPORT:
        raise ValueError("oracle limited to small instances")
    d_bar = float(np.dot(model.dist.degrees, model.dist.probs))
    best, best_val = None, math.inf
    for perm in itertools.permutations(range(len(degrees))):
        for prefix in range(1, len(perm) + 1):
            nu = [0.0] * len(degrees)
            rest = 1.0
            for j in perm[:prefix]:
                nu[j] = min(rest, cap[j])
                rest -= nu[j]
            if rest > 1e-12:
                continue
            val = _objective(d_bar, q_gamma, mu, nu)
            if val < best_val:
                best, best_val = nu, val
    if best is None:
        raise ValueError("no feasible vertex: total capacity below 1")
    if grid > 0:
        for point in itertools.product(*(np.linspace(0, c, grid + 1) for c in cap[:-1])):
            last = 1.0 - sum(point)
            if 0.0 <= last <= cap[-1]:
                val = _objective(d_bar, q_gamma, mu, list(point) + [last])
                if val < best_val - 1e-12:
                    raise AssertionError("lattice point beats every vertex")
    return dict(zip(degrees, best))


def grid_search_min_cost(model: PercolationModel, gamma: float, step: float = 0.05):
    """Cheapest grid policy with s(q) >= gamma - 1e-6; returns (cost, policy)."""
    dist = model.dist
    if len(dist.degrees) > MAX_GRID_SUPPORT:
        raise ValueError("oracle limited to small instances")
    if not 0.0 < step <= 0.5:
        raise ValueError("step must lie in (0, 0.5]")
    levels = np.unique(np.append(np.arange(0.0, 1.0, step), 1.0))
    costs = model.params.cost_array(dist.degrees)
    cache = {}
    best_cost, best_phi = math.inf, None
    for phis in itertools.product(levels, repeat=len(dist.degrees)):
        policy = IncentivePolicy(dict(zip(dist.degrees.tolist(), phis)))
        q = edge_type2_probability(dist, policy)
        key = round(q, 14)
        if key not in cache:
            cache[key] = profile(model, q)
        prof = cache[key]
        if prof.size < gamma - 1e-6:
            continue
        cost = sum(
            p * c * f * s
            for k, p, c, f, s in zip(dist.degrees, dist.probs, costs, phis, prof.s_k)
            if k >= 1
        )
        if cost < best_cost:
            best_cost, best_phi = cost, policy
    if best_phi is None:
        raise ValueError("target unreachable on grid")
    return best_cost, best_phi


def _tail_direct(n, p, m):
    if m <= 0:
        return 1.0
    return float(sum(math.comb(n, i) * p**i * (1.0 - p) ** (n - i) for i in range(m, n + 1)))


def correlated_tree_prediction(model: PercolationModel, policy: IncentivePolicy, tol: float = 1e-13, max_iter: int = 100_000):
    """Tree-limit size and per-node cost that keep a neighbour's type tied to its degree.

    The analytic model treats a neighbour's type as independent of whether it
    registered. Under a degree-dependent policy the two are correlated, since
    both depend on the neighbour's degree. Here the recursion is carried on the
    probability ``a`` that a neighbour reached along an edge is registered and
    active, weighting each excess-degree class by its own activation rate.
    Returns ``(size, cost)``. For a uniform policy this coincides with the
    analytic model.
    """
    dist, th, pa = model.dist, model.thresholds, model.params
    d_bar = float(np.dot(dist.degrees, dist.probs))
    rows = []
    for k, p in zip(dist.degrees.tolist(), dist.probs.tolist()):
        phi = policy(k)
        rate = phi * pa.alpha2 + (1.0 - phi) * pa.alpha1
        ms, ps = th.support(k)
        rows.append((k, p, phi, rate, list(zip(ms.tolist(), ps.tolist()))))

    def registered(k, a, excess):
        n = k - 1 if excess else k
        return sum(pm * (1.0 if m == 0 else (_tail_direct(n, a, m) if n >= 0 else 0.0)) for m, pm in th_rows[k])

    th_rows = {k: sup for k, _, _, _, sup in rows}
    a = 0.0
    for _ in range(max_iter):
        new = sum(k * p / d_bar * rate * registered(k, a, True) for k, p, _, rate, _ in rows if k >= 1)
        if abs(new - a) <= tol:
            a = new
            break
        a = new
    size = sum(p * registered(k, a, False) for k, p, _, _, _ in rows)
    cost = sum(p * model.params.cost(k) * phi * registered(k, a, False) for k, p, phi, _, _ in rows if k >= 1)
    return size, cost
