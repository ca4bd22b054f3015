"""Degree distributions, threshold models, incentive policies and campaign parameters."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import DegenerateDistributionError, InputParseError

PMF_TOL = 1e-12


def _frozen(arr):
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


def _check_probability(name, x):
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


@dataclass(frozen=True)
class DegreeDistribution:
    """Probability mass over node degrees.

    Only degrees with positive mass are stored. ``degrees`` is sorted
    ascending and ``probs`` is aligned with it.
    """

    degrees: np.ndarray
    probs: np.ndarray

    def __init__(self, pmf: Mapping[int, float], normalize: bool = False):
        items = sorted((int(k), float(p)) for k, p in pmf.items())
        for k, p in items:
            if k < 0:
                raise ValueError(f"negative degree {k}")
            if p < 0 or math.isnan(p):
                raise ValueError(f"negative probability {p} for degree {k}")
        items = [(k, p) for k, p in items if p > 0]
        if not items:
            raise DegenerateDistributionError("degenerate distribution: no probability mass")
        total = math.fsum(p for _, p in items)
        if normalize:
            items = [(k, p / total) for k, p in items]
        elif abs(total - 1.0) > PMF_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1 (use normalize=True to rescale)")
        object.__setattr__(self, "degrees", _frozen(np.array([k for k, _ in items], dtype=np.int64)))
        object.__setattr__(self, "probs", _frozen(np.array([p for _, p in items], dtype=float)))

    @property
    def pmf(self) -> dict[int, float]:
        return dict(zip(self.degrees.tolist(), self.probs.tolist()))

    @property
    def k_max(self) -> int:
        return int(self.degrees[-1])

    @property
    def mean(self) -> float:
        return math.fsum((self.degrees * self.probs).tolist())

    def p(self, k: int) -> float:
        i = np.searchsorted(self.degrees, k)
        if i < len(self.degrees) and self.degrees[i] == k:
            return float(self.probs[i])
        return 0.0

    def __eq__(self, other):
        if not isinstance(other, DegreeDistribution):
            return NotImplemented
        return np.array_equal(self.degrees, other.degrees) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.degrees.tobytes(), self.probs.tobytes()))

    def __repr__(self):
        return f"DegreeDistribution(support={len(self.degrees)}, k_max={self.k_max}, mean={self.mean:.6g})"


def from_degree_sequence(degrees) -> DegreeDistribution:
    degrees = np.asarray(degrees, dtype=np.int64)
    if degrees.size == 0:
        raise DegenerateDistributionError("empty graph")
    values, counts = np.unique(degrees, return_counts=True)
    n = degrees.size
    return DegreeDistribution({int(k): c / n for k, c in zip(values, counts)}, normalize=True)


def from_graph(graph) -> DegreeDistribution:
    """Empirical degree pmf of a :class:`~incascade.simulator.Graph`."""
    if graph.n == 0:
        raise DegenerateDistributionError("empty graph")
    return from_degree_sequence(graph.degrees)


def excess_distribution(dist: DegreeDistribution) -> dict[int, float]:
    d_bar = dist.mean
    if d_bar <= 0:
        raise DegenerateDistributionError("degenerate distribution: mean degree is 0")
    return {int(k) - 1: float(k * p / d_bar) for k, p in zip(dist.degrees, dist.probs) if k >= 1}


@dataclass(frozen=True)
class IncentivePolicy:
    """Per-degree incentivization probability; absent degrees have phi = 0."""

    phi: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.phi.items():
            v = float(v)
            _check_probability(f"phi({k})", v)
            clean[int(k)] = v
        object.__setattr__(self, "phi", MappingProxyType(dict(sorted(clean.items()))))

    def __call__(self, k: int) -> float:
        return self.phi.get(int(k), 0.0)

    def values_for(self, degrees) -> np.ndarray:
        return np.array([self.phi.get(int(k), 0.0) for k in degrees], dtype=float)

    def __eq__(self, other):
        if not isinstance(other, IncentivePolicy):
            return NotImplemented
        return dict(self.phi) == dict(other.phi)

    def __hash__(self):
        return hash(tuple(self.phi.items()))

    @classmethod
    def constant(cls, value: float, dist: DegreeDistribution) -> "IncentivePolicy":
        return cls({int(k): value for k in dist.degrees})


def edge_type2_probability(dist: DegreeDistribution, policy: IncentivePolicy) -> float:
    """Probability that the endpoint of a uniformly chosen edge is incentivized."""
    d_bar = dist.mean
    if d_bar <= 0:
        raise DegenerateDistributionError("degenerate distribution: mean degree is 0")
    phi = policy.values_for(dist.degrees)
    q = math.fsum((dist.degrees * phi * dist.probs).tolist()) / d_bar
    return min(max(q, 0.0), 1.0)


SCHEMES = ("uniform", "high_degree", "low_degree")


def make_policy(scheme: str, q_target: float, dist: DegreeDistribution) -> IncentivePolicy:
    """Build a policy of the given scheme whose edge-type probability is ``q_target``.

    ``high_degree`` incentivizes every node from the largest degree downwards
    and ``low_degree`` from the smallest positive degree upwards; the degree
    where the target is reached gets a fractional probability. Degree-0 nodes
    carry no edge weight and are left out of both ordered schemes.
    """
    _check_probability("q_target", q_target)
    if scheme == "uniform":
        return IncentivePolicy.constant(q_target, dist)
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    d_bar = dist.mean
    positive = [(int(k), k * p / d_bar) for k, p in zip(dist.degrees, dist.probs) if k >= 1]
    if scheme == "high_degree":
        positive.reverse()
    phi = {}
    remaining = q_target
    for k, weight in positive:
        if remaining <= 0:
            break
        if weight <= remaining:
            phi[k] = 1.0
            remaining -= weight
        else:
            phi[k] = remaining / weight
            remaining = 0.0
    return IncentivePolicy(phi)


class ThresholdModel:
    """Conditional distribution of registration thresholds given degree."""

    def support(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Threshold values m and their probabilities for degree k."""
        raise NotImplementedError

    def zealous(self, k: int) -> float:
        ms, ps = self.support(k)
        return float(ps[ms == 0].sum())

    def covers(self, k: int) -> bool:
        return True


@dataclass(frozen=True)
class ParametricThresholds(ThresholdModel):
    """Zealous with probability ``zealous_fraction``, else threshold max(1, ceil(beta*k))."""

    zealous_fraction: float
    threshold_fraction: float = 0.5

    def __post_init__(self):
        _check_probability("zealous_fraction", self.zealous_fraction)
        if not (0.0 < self.threshold_fraction <= 1.0):
            raise ValueError(f"threshold_fraction must lie in (0, 1], got {self.threshold_fraction}")

    def threshold(self, k: int) -> int:
        # round first so products like 0.3 * 10 do not ceil up to 4
        return max(1, math.ceil(round(self.threshold_fraction * k, 9)))

    def support(self, k):
        z = self.zealous_fraction
        m = self.threshold(k)
        if z >= 1.0:
            return np.array([0]), np.array([1.0])
        if z <= 0.0:
            return np.array([m]), np.array([1.0])
        return np.array([0, m]), np.array([z, 1.0 - z])

    def zealous(self, k):
        return self.zealous_fraction


@dataclass(frozen=True)
class TableThresholds(ThresholdModel):
    """Explicit table p_th(m | k) keyed by degree, then threshold."""

    table: Mapping[int, Mapping[int, float]]

    def __post_init__(self):
        clean = {}
        for k, row in self.table.items():
            row = {int(m): float(p) for m, p in row.items() if float(p) != 0.0}
            if any(p < 0 for p in row.values()) or any(m < 0 for m in row):
                raise ValueError(f"negative threshold or probability for degree {k}")
            total = math.fsum(row.values())
            if abs(total - 1.0) > PMF_TOL:
                raise ValueError(f"threshold probabilities for degree {k} sum to {total!r}, not 1")
            clean[int(k)] = MappingProxyType(dict(sorted(row.items())))
        object.__setattr__(self, "table", MappingProxyType(dict(sorted(clean.items()))))

    def covers(self, k):
        return int(k) in self.table

    def support(self, k):
        try:
            row = self.table[int(k)]
        except KeyError:
            raise KeyError(f"threshold table has no row for degree {k}") from None
        return np.array(list(row), dtype=np.int64), np.array(list(row.values()), dtype=float)

    @classmethod
    def from_parametric(cls, model: ParametricThresholds, degrees) -> "TableThresholds":
        return cls({int(k): dict(zip(*(a.tolist() for a in model.support(k)))) for k in degrees})


@dataclass(frozen=True)
class CampaignParams:
    """Activation probabilities of type-1/type-2 nodes and the incentive cost schedule.

    ``costs`` maps degree to c_k. ``None`` means the linear schedule c_k = k.
    Costs of degree-0 nodes are never charged.
    """

    alpha1: float
    alpha2: float
    costs: Mapping[int, float] | None = None

    def __post_init__(self):
        for name in ("alpha1", "alpha2"):
            a = getattr(self, name)
            if not (0.0 < a <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1], got {a}")
        if self.costs is not None:
            costs = {int(k): float(c) for k, c in self.costs.items()}
            if any(c < 0 for c in costs.values()):
                raise ValueError("costs must be nonnegative")
            object.__setattr__(self, "costs", MappingProxyType(dict(sorted(costs.items()))))

    def cost(self, k: int) -> float:
        if k <= 0:
            return 0.0
        if self.costs is None:
            return float(k)
        try:
            return self.costs[int(k)]
        except KeyError:
            raise KeyError(f"no cost defined for degree {k}") from None

    def cost_array(self, degrees) -> np.ndarray:
        return np.array([self.cost(int(k)) for k in degrees], dtype=float)


# --- CSV serialization -------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _read_rows(path, ncols):
    path = Path(path)
    try:
        handle = path.open(newline="")
    except OSError as exc:
        raise InputParseError(f"{path}: cannot open ({exc.strerror})") from exc
    rows = []
    with handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) != ncols:
                raise InputParseError(f"{path}:{lineno}: expected {ncols} columns, got {len(row)}")
            try:
                ints = [int(c) for c in row[:-1]]
                value = float(row[-1])
            except ValueError:
                if lineno == 1 or not rows:
                    continue  # header
                raise InputParseError(f"{path}:{lineno}: cannot parse {row!r}") from None
            rows.append((lineno, ints, value))
    if not rows:
        raise InputParseError(f"{path}: no data rows")
    return rows


def read_degree_csv(path, normalize: bool = False) -> DegreeDistribution:
    """Read a two-column ``degree,probability`` CSV."""
    pmf = {}
    for lineno, (k,), p in _read_rows(path, 2):
        if k in pmf:
            raise InputParseError(f"{path}:{lineno}: duplicate degree {k}")
        pmf[k] = p
    try:
        return DegreeDistribution(pmf, normalize=normalize)
    except ValueError as exc:
        raise InputParseError(f"{path}: {exc}") from exc


def write_degree_csv(dist: DegreeDistribution, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["degree", "probability"])
        for k, p in zip(dist.degrees.tolist(), dist.probs.tolist()):
            w.writerow([k, _fmt(p)])


def read_threshold_csv(path) -> TableThresholds:
    """Read a three-column ``degree,threshold,probability`` CSV."""
    table: dict[int, dict[int, float]] = {}
    for lineno, (k, m), p in _read_rows(path, 3):
        row = table.setdefault(k, {})
        if m in row:
            raise InputParseError(f"{path}:{lineno}: duplicate entry for degree {k}, threshold {m}")
        row[m] = p
    try:
        return TableThresholds(table)
    except ValueError as exc:
        raise InputParseError(f"{path}: {exc}") from exc


def write_threshold_csv(model: TableThresholds, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["degree", "threshold", "probability"])
        for k, row in model.table.items():
            for m, p in row.items():
                w.writerow([k, m, _fmt(p)])


def read_cost_csv(path) -> dict[int, float]:
    """Read a two-column ``degree,cost`` CSV."""
    return {k: c for _, (k,), c in _read_rows(path, 2)}
