"""Incentivized threshold cascades on random networks.

Percolation analytics for the expected cascade size, the two incentive
allocation problems (cheapest policy for a size target, largest cascade for a
budget), and Monte Carlo simulation on concrete graphs.
"""
from ._kernels import BACKEND
from .degree import (
    CampaignParams,
    DegreeDistribution,
    IncentivePolicy,
    ParametricThresholds,
    TableThresholds,
    ThresholdModel,
    edge_type2_probability,
    excess_distribution,
    from_graph,
    make_policy,
)
from .errors import CascadeError, ConvergenceError, InfeasibleTargetError, InputParseError
from .optimizer import CostPlan, SizePlan, find_q_gamma, maximize_cascade, minimize_cost, nu_to_phi, solve_p2
from .percolation import (
    FixedPointResult,
    PercolationModel,
    active_neighbor_probability,
    binomial_tail,
    cascade_fraction,
    cascade_fraction_by_degree,
    eval_f,
    expected_cost,
    profile,
    solve_fixed_point,
)
from .simulator import (
    CascadeOutcome,
    Graph,
    MCSummary,
    generate_configuration_model,
    monte_carlo,
    read_edge_list,
    run_cascade,
)

__all__ = [
    "CascadeError",
    "ConvergenceError",
    "InfeasibleTargetError",
    "InputParseError",
    "CostPlan",
    "SizePlan",
    "find_q_gamma",
    "maximize_cascade",
    "minimize_cost",
    "nu_to_phi",
    "solve_p2",
    "BACKEND",
    "CampaignParams",
    "DegreeDistribution",
    "IncentivePolicy",
    "ParametricThresholds",
    "TableThresholds",
    "ThresholdModel",
    "edge_type2_probability",
    "excess_distribution",
    "from_graph",
    "make_policy",
    "FixedPointResult",
    "PercolationModel",
    "active_neighbor_probability",
    "binomial_tail",
    "cascade_fraction",
    "cascade_fraction_by_degree",
    "eval_f",
    "expected_cost",
    "profile",
    "solve_fixed_point",
    "CascadeOutcome",
    "Graph",
    "MCSummary",
    "generate_configuration_model",
    "monte_carlo",
    "read_edge_list",
    "run_cascade",
]

__version__ = "0.1.0"
