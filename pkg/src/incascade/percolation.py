"""Self-consistency function, its fixed point, and expected cascade sizes.

A neighbour reached along a random edge is incentivized with probability q
and ends up registered with probability u; it recommends with probability
``alpha2`` or ``alpha1`` depending on its type. Mixing over the neighbour's
type makes each neighbour independently active with probability
``u * (q*alpha2 + (1-q)*alpha1)``, so the number of active neighbours of a
degree-k node is a single binomial, and every threshold tail is one
``P[Bin(k, p) >= m]`` evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .degree import (
    CampaignParams,
    DegreeDistribution,
    IncentivePolicy,
    ThresholdModel,
    edge_type2_probability,
)
from .errors import ConvergenceError

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class FixedPointResult:
    u: float
    iterations: int
    residual: float


@dataclass(frozen=True, eq=False)
class PercolationModel:
    dist: DegreeDistribution
    thresholds: ThresholdModel
    params: CampaignParams

    def __post_init__(self):
        missing = [int(k) for k in self.dist.degrees if not self.thresholds.covers(int(k))]
        if missing:
            raise ValueError(f"threshold model does not cover degrees {missing[:10]}")

    @cached_property
    def _f_terms(self):
        # zealous constant plus (excess degree, threshold, weight) triples
        d_bar = self.dist.mean
        zealous = 0.0
        n, m, w = [], [], []
        for k, p in zip(self.dist.degrees.tolist(), self.dist.probs.tolist()):
            if k < 1:
                continue
            p_ex = k * p / d_bar
            ms, ps = self.thresholds.support(k)
            for mm, pp in zip(ms.tolist(), ps.tolist()):
                if mm == 0:
                    zealous += p_ex * pp
                elif k - 1 >= 1:
                    n.append(k - 1)
                    m.append(mm)
                    w.append(p_ex * pp)
        return zealous, np.array(n, dtype=np.int64), np.array(m, dtype=np.int64), np.array(w)

    @cached_property
    def _g_terms(self):
        # per degree class: zealous mass, plus (class index, threshold, weight) triples
        zealous = np.zeros(len(self.dist.degrees))
        idx, n, m, w = [], [], [], []
        for i, k in enumerate(self.dist.degrees.tolist()):
            ms, ps = self.thresholds.support(k)
            for mm, pp in zip(ms.tolist(), ps.tolist()):
                if mm == 0:
                    zealous[i] += pp
                elif mm <= k:
                    idx.append(i)
                    n.append(k)
                    m.append(mm)
                    w.append(pp)
        return (
            zealous,
            np.array(idx, dtype=np.int64),
            np.array(n, dtype=np.int64),
            np.array(m, dtype=np.int64),
            np.array(w),
        )

    @cached_property
    def costs(self) -> np.ndarray:
        return self.params.cost_array(self.dist.degrees)


def active_neighbor_probability(q: float, u: float, params: CampaignParams) -> float:
    """Probability that a neighbour reached along an edge is registered and active."""
    return u * (q * params.alpha2 + (1.0 - q) * params.alpha1)


def binomial_tail(k: int, p: float, m: int) -> float:
    """P[Bin(k, p) >= m]."""
    return float(_kernels.binomial_tail(int(k), float(p), int(m)))


def eval_f(model: PercolationModel, q: float, u: float) -> float:
    zealous, n, m, w = model._f_terms
    if n.size == 0:
        return zealous
    p = active_neighbor_probability(q, u, model.params)
    return zealous + float(np.dot(w, _kernels.tails(n, m, p)))


def eval_f_slope(model: PercolationModel, q: float, u: float) -> float:
    """Partial derivative of f(q, u) with respect to u."""
    _, n, m, w = model._f_terms
    if n.size == 0:
        return 0.0
    rate = q * model.params.alpha2 + (1.0 - q) * model.params.alpha1
    return rate * float(np.dot(w, _kernels.tail_slopes(n, m, u * rate)))


def _advance(f, df, u, h, slope, tol):
    """Next iterate above u with no root of f(x) - x in [u, next), or a bracket (a, b).

    Forward iteration ``u + h`` is always safe because f is nondecreasing.
    The larger jumps below use local shape information (second differences
    of the slope) to skip stretches where f(x) - x is small but positive,
    which is where forward iteration crawls.
    """
    fwd = u + h
    if slope >= 1.0:
        # f(x) - x is increasing here; stretch the step while it keeps increasing
        best, step = fwd, h
        for _ in range(60):
            step *= 2.0
            v = u + step
            if v >= 1.0 or f(v) - v <= h or df(v) < 1.0:
                break
            best = max(best, v)
        return best
    correction = h / (1.0 - slope)
    d = max(1e-7, 1e-3 * correction)
    curvature = (df(min(u + d, 1.0)) - slope) / d
    v = min(u + correction, 1.0)
    if curvature <= 0.0:
        # locally concave: the tangent root lies beyond the curve's root
        return (u, v) if f(v) - v <= 0.0 else fwd
    hv, sv = f(v) - v, df(v)
    if sv <= 1.0:
        return max(v, fwd) if hv > 0.0 else (u, v)
    # f(x) - x turns upward inside (u, v): locate the turning point
    a, b = u, v
    for _ in range(200):
        c = 0.5 * (a + b)
        if c <= a or c >= b or b - a <= 1e-3 * tol:
            break
        if df(c) < 1.0:
            a = c
        else:
            b = c
    hc = f(a) - a
    return max(a, fwd) if hc > 0.0 else (u, a)


def smallest_fixed_point(f, df, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER, u0: float = 0.0):
    """Smallest root of ``u = f(u)`` on [u0, 1] for nondecreasing ``f`` with f(u0) >= u0.

    Returns ``(u, iterations, residual)``. Iterates approach the root from
    below and never pass it.
    """
    from scipy.optimize import brentq

    u = f(u0)
    residual = math.inf
    for it in range(1, max_iter + 1):
        h = f(u) - u
        residual = abs(h)
        slope = df(u)
        if residual <= tol:
            if slope >= 1.0 or abs(h / (1.0 - slope)) <= tol:
                return u, it, residual
        if h <= 0.0:
            return u, it, residual
        nxt = _advance(f, df, u, h, slope, tol)
        if isinstance(nxt, tuple):
            a, b = nxt
            if f(b) - b == 0.0:
                r = b
            else:
                r = brentq(lambda x: f(x) - x, a, b, xtol=1e-3 * tol, rtol=8.9e-16, maxiter=500)
            return r, it, abs(f(r) - r)
        if nxt <= u:
            return u, it, residual
        u = nxt
    raise ConvergenceError(
        f"fixed point not reached in {max_iter} iterations (residual={residual:.3e})",
        last=u,
        residual=residual,
        iterations=max_iter,
    )


def solve_fixed_point(
    model: PercolationModel, q: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> FixedPointResult:
    """Smallest solution of ``u = f(q, u)``, reached monotonically from ``f(q, 0)``.

    This is the root that forward iteration from zero converges to, i.e. the
    cascade grown from the zealous seeds.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    try:
        u, it, residual = smallest_fixed_point(
            lambda x: eval_f(model, q, x), lambda x: eval_f_slope(model, q, x), tol=tol, max_iter=max_iter
        )
    except ConvergenceError as exc:
        raise ConvergenceError(f"q={q}: {exc}", last=exc.last, residual=exc.residual, iterations=exc.iterations) from None
    return FixedPointResult(u=u, iterations=it, residual=residual)


@dataclass(frozen=True)
class CascadeProfile:
    """Everything computed at one value of q."""

    q: float
    fixed_point: FixedPointResult
    degrees: np.ndarray
    s_k: np.ndarray
    size: float

    @property
    def u(self) -> float:
        return self.fixed_point.u

    def by_degree(self) -> dict[int, float]:
        return dict(zip(self.degrees.tolist(), self.s_k.tolist()))


def _g_at(model: PercolationModel, q: float, u: float) -> np.ndarray:
    zealous, idx, n, m, w = model._g_terms
    s_k = zealous.copy()
    if idx.size:
        p = active_neighbor_probability(q, u, model.params)
        s_k += np.bincount(idx, weights=w * _kernels.tails(n, m, p), minlength=len(s_k))
    return np.clip(s_k, 0.0, 1.0)


def profile(model: PercolationModel, q: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> CascadeProfile:
    fp = solve_fixed_point(model, q, tol=tol, max_iter=max_iter)
    s_k = _g_at(model, q, fp.u)
    size = math.fsum((model.dist.probs * s_k).tolist())
    return CascadeProfile(q=q, fixed_point=fp, degrees=model.dist.degrees, s_k=s_k, size=min(size, 1.0))


def cascade_fraction_by_degree(model: PercolationModel, q: float, **kw) -> dict[int, float]:
    return profile(model, q, **kw).by_degree()


def cascade_fraction(model: PercolationModel, q: float, **kw) -> float:
    return profile(model, q, **kw).size


def policy_cost(model: PercolationModel, phi: np.ndarray, s_k: np.ndarray) -> float:
    """sum_k p(k) c_k phi(k) s_k with arrays aligned to the degree support."""
    return math.fsum((model.dist.probs * model.costs * phi * s_k).tolist())


def expected_cost(model: PercolationModel, policy: IncentivePolicy, **kw) -> float:
    """Expected incentive spend per node; only registered incentivized nodes are paid."""
    q = edge_type2_probability(model.dist, policy)
    prof = profile(model, q, **kw)
    return policy_cost(model, policy.values_for(model.dist.degrees), prof.s_k)
