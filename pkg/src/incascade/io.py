"""Run configuration, input loading, and CSV/JSON result emission."""
from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .degree import (
    CampaignParams,
    DegreeDistribution,
    IncentivePolicy,
    ParametricThresholds,
    ThresholdModel,
    from_graph,
    read_cost_csv,
    read_degree_csv,
    read_threshold_csv,
)
from .errors import InputParseError
from .optimizer import CostPlan, SizePlan
from .percolation import PercolationModel
from .simulator import Graph, generate_configuration_model, read_edge_list

CASCADE_COLUMNS = ("q", "u", "s")
SIMULATE_COLUMNS = ("scheme", "q", "mean_size", "stderr_size", "mean_cost", "stderr_cost", "runs", "seed")


@dataclass(frozen=True)
class RunConfig:
    alpha1: float = 0.1
    alpha2: float = 0.9
    zealous_fraction: float = 0.3
    threshold_fraction: float = 0.5
    cost_schedule: str = "linear"
    threshold_table: str | None = None
    eps: float = 1e-6
    tolerance: float = 1e-10
    seed: int = 0
    runs: int = 10_000
    normalize: bool = False

    def params(self) -> CampaignParams:
        costs = None if self.cost_schedule == "linear" else read_cost_csv(self.cost_schedule)
        return CampaignParams(self.alpha1, self.alpha2, costs)

    def thresholds(self) -> ThresholdModel:
        if self.threshold_table:
            return read_threshold_csv(self.threshold_table)
        return ParametricThresholds(self.zealous_fraction, self.threshold_fraction)

    def model(self, dist: DegreeDistribution) -> PercolationModel:
        return PercolationModel(dist, self.thresholds(), self.params())


def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    return f"{float(x):.17g}"


def load_distribution(dist_csv=None, edges=None, normalize=False) -> DegreeDistribution:
    if (dist_csv is None) == (edges is None):
        raise InputParseError("give exactly one of a degree CSV or an edge list")
    if dist_csv is not None:
        return read_degree_csv(dist_csv, normalize=normalize)
    return from_graph(read_edge_list(edges))


def parse_generator_spec(spec: str, seed: int, normalize: bool = False) -> Graph:
    """``config-model:n=<int>,dist=<csv path>``."""
    kind, _, rest = spec.partition(":")
    if kind != "config-model" or not rest:
        raise InputParseError(f"unknown generator spec {spec!r}; expected config-model:n=<int>,dist=<csv>")
    opts = {}
    for part in rest.split(","):
        key, sep, value = part.partition("=")
        if not sep:
            raise InputParseError(f"malformed generator option {part!r}")
        opts[key.strip()] = value.strip()
    try:
        n = int(opts["n"])
        dist = read_degree_csv(opts["dist"], normalize=normalize)
    except KeyError as exc:
        raise InputParseError(f"generator spec missing {exc.args[0]!r}") from None
    except ValueError:
        raise InputParseError(f"generator n must be an integer, got {opts.get('n')!r}") from None
    return generate_configuration_model(dist, n, seed=seed)


def write_csv(rows, columns, out=None) -> None:
    handle = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(handle, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    finally:
        if out:
            handle.close()


def _phi_json(policy: IncentivePolicy) -> dict:
    return {str(k): v for k, v in policy.phi.items()}


def cost_plan_to_dict(plan: CostPlan, gamma: float) -> dict:
    return {
        "kind": "minimize",
        "gamma": gamma,
        "q_gamma": plan.q_gamma,
        "phi": _phi_json(plan.policy),
        "nu": {str(k): v for k, v in plan.nu.items()},
        "expected_cost": plan.expected_cost,
        "predicted_size": plan.predicted_size,
        "boundary_case": plan.boundary_case,
    }


def size_plan_to_dict(plan: SizePlan, budget: float) -> dict:
    return {
        "kind": "maximize",
        "budget": budget,
        "q_opt": plan.q_opt,
        "phi": _phi_json(plan.policy),
        "predicted_size": plan.predicted_size,
        "expected_cost": plan.expected_cost,
    }


def dump_json(obj, out=None) -> None:
    # json emits floats via repr, which round-trips doubles exactly
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def load_plan(path) -> dict:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise InputParseError(f"{path}: cannot open ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise InputParseError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    if "phi" not in data:
        raise InputParseError(f"{path}: plan has no 'phi' field")
    return data


def plan_policy(plan: dict) -> IncentivePolicy:
    return IncentivePolicy({int(k): float(v) for k, v in plan["phi"].items()})


def plan_q(plan: dict) -> float:
    return float(plan.get("q_gamma", plan.get("q_opt", float("nan"))))
