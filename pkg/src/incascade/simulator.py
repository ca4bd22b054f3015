"""Monte Carlo simulation of incentivized threshold cascades on concrete graphs."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .degree import CampaignParams, DegreeDistribution, IncentivePolicy, ThresholdModel
from .errors import DegenerateDistributionError, InputParseError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph in CSR form (neighbours of v are indices[indptr[v]:indptr[v+1]])."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """Each undirected edge once, as rows (u, v) with u < v."""
        src = np.repeat(np.arange(self.n), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an (E, 2) integer array; self-loops and duplicates are dropped."""
        g, _, _ = _build(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))
        return g


def _build(n, edges):
    u, v = edges[:, 0], edges[:, 1]
    loops = u == v
    lo, hi = np.minimum(u, v)[~loops], np.maximum(u, v)[~loops]
    key = np.unique(lo * np.int64(n) + hi)
    dupes = int(lo.size - key.size)
    lo, hi = key // n, key % n
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(n=int(n), indptr=indptr, indices=dst.astype(np.int64)), int(loops.sum()), dupes


def read_edge_list(path) -> Graph:
    """Whitespace-separated integer pairs, '#' comments; ids are remapped to 0..n-1."""
    path = Path(path)
    pairs = []
    try:
        fh = path.open()
    except OSError as exc:
        raise InputParseError(f"{path}: cannot open ({exc.strerror})") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("%"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise InputParseError(f"{path}:{lineno}: expected two node ids, got {line!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise InputParseError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
    if not pairs:
        raise InputParseError(f"{path}: no edges")
    raw = np.array(pairs, dtype=np.int64)
    ids, inverse = np.unique(raw, return_inverse=True)
    graph, loops, dupes = _build(len(ids), inverse.reshape(-1, 2))
    if loops or dupes:
        log.warning("%s: dropped %d self-loops and %d duplicate edges", path, loops, dupes)
    return graph


def write_edge_list(graph: Graph, path) -> None:
    np.savetxt(path, graph.edges(), fmt="%d", header=f"n={graph.n} edges={graph.edge_count}")


def generate_configuration_model(dist: DegreeDistribution, n: int, seed=None) -> Graph:
    """Erased configuration model with i.i.d. degrees drawn from ``dist``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if dist.mean <= 0:
        raise DegenerateDistributionError("degenerate distribution: all mass at degree 0")
    rng = np.random.default_rng(seed)
    deg = rng.choice(dist.degrees, size=n, p=dist.probs)
    if deg.sum() % 2:
        deg[rng.integers(n)] += 1
    stubs = np.repeat(np.arange(n, dtype=np.int64), deg)
    rng.shuffle(stubs)
    graph, _, _ = _build(n, stubs.reshape(-1, 2))
    return graph


@dataclass(frozen=True, eq=False)
class CascadeOutcome:
    registered: np.ndarray
    active: np.ndarray
    incentivized: np.ndarray
    rounds: int
    registered_fraction: float
    registered_fraction_by_degree: dict
    realized_cost: float

    @property
    def cost_per_node(self) -> float:
        return self.realized_cost / self.registered.size


@dataclass(frozen=True)
class MCSummary:
    """Means and standard errors over runs; ``mean_cost`` is per node."""

    runs: int
    mean_size: float
    stderr_size: float
    mean_cost: float
    stderr_cost: float


def _per_node(values_by_degree, degrees):
    support = np.unique(degrees)
    table = np.array([values_by_degree(int(k)) for k in support], dtype=float)
    return table[np.searchsorted(support, degrees)]


def _draw_thresholds(thresholds: ThresholdModel, degrees, uniforms):
    out = np.empty(degrees.size, dtype=np.int64)
    for k in np.unique(degrees):
        ms, ps = thresholds.support(int(k))
        sel = degrees == k
        cdf = np.cumsum(ps)
        cdf[-1] = 1.0
        out[sel] = ms[np.searchsorted(cdf, uniforms[sel], side="right")]
    return out


def draw_node_states(graph: Graph, policy: IncentivePolicy, thresholds: ThresholdModel, params: CampaignParams, rng):
    """Type, threshold and activation intent for every node, in that draw order."""
    degrees = graph.degrees
    incentivized = rng.random(graph.n) < _per_node(policy, degrees)
    threshold = _draw_thresholds(thresholds, degrees, rng.random(graph.n))
    alpha = np.where(incentivized, params.alpha2, params.alpha1)
    intent = rng.random(graph.n) < alpha
    return incentivized, threshold, intent


def run_cascade(
    graph: Graph,
    policy: IncentivePolicy,
    thresholds: ThresholdModel,
    params: CampaignParams,
    seed=None,
    *,
    states=None,
) -> CascadeOutcome:
    """One realization of the synchronous-round threshold cascade.

    Zealous nodes (threshold 0) register at round 0. In each later round an
    unregistered node registers once its number of active neighbours reaches
    its threshold; a node that registers becomes active if its pre-drawn
    activation intent is set. Stops after the first round that changes nothing.
    """
    if graph.n == 0:
        raise ValueError("graph is empty")
    if states is None:
        states = draw_node_states(graph, policy, thresholds, params, np.random.default_rng(seed))
    incentivized, threshold, intent = states
    registered, active, rounds = _kernels.cascade_rounds(graph.indptr, graph.indices, threshold, intent)
    degrees = graph.degrees
    support, inverse, counts = np.unique(degrees, return_inverse=True, return_counts=True)
    reg_by_degree = np.bincount(inverse, weights=registered, minlength=support.size) / counts
    paid = registered & incentivized
    realized = float(_per_node(params.cost, degrees)[paid].sum())
    return CascadeOutcome(
        registered=registered,
        active=active,
        incentivized=incentivized,
        rounds=int(rounds),
        registered_fraction=float(registered.mean()),
        registered_fraction_by_degree=dict(zip(support.tolist(), reg_by_degree.tolist())),
        realized_cost=realized,
    )


def run_seeds(seed, runs: int) -> list[np.random.SeedSequence]:
    """Per-run seed sequences, a pure function of (seed, run index)."""
    return np.random.SeedSequence(seed).spawn(runs)


def monte_carlo(
    graph: Graph,
    policy: IncentivePolicy,
    thresholds: ThresholdModel,
    params: CampaignParams,
    runs: int,
    seed=None,
    workers: int = 1,
) -> MCSummary:
    if runs < 1:
        raise ValueError("runs must be at least 1")
    seeds = run_seeds(seed, runs)

    def one(ss):
        out = run_cascade(graph, policy, thresholds, params, ss)
        return out.registered_fraction, out.cost_per_node

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(ss) for ss in seeds]
    # reduction in run-index order keeps the summary schedule independent
    sizes = np.array([r[0] for r in results])
    costs = np.array([r[1] for r in results])

    def stderr(x):
        return float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0

    return MCSummary(
        runs=runs,
        mean_size=float(sizes.mean()),
        stderr_size=stderr(sizes),
        mean_cost=float(costs.mean()),
        stderr_cost=stderr(costs),
    )
