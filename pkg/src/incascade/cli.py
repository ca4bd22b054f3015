"""Command-line interface.

Exit codes: 0 success, 2 infeasible target, 3 input/usage error,
4 convergence failure. Errors are reported on stderr as one JSON object.
"""
from __future__ import annotations

import json
import logging
import sys

import click
import numpy as np

from . import io
from .degree import edge_type2_probability, from_graph, make_policy, write_degree_csv
from .errors import CascadeError
from .optimizer import maximize_cascade, minimize_cost
from .percolation import expected_cost, profile
from .simulator import monte_carlo, read_edge_list, write_edge_list, generate_configuration_model

SCHEME_ALIASES = {"uniform": "uniform", "all": "uniform", "high": "high_degree", "low": "low_degree"}


def _model_options(fn):
    options = [
        click.option("--alpha1", type=float, default=0.1, show_default=True, help="Activation probability, non-incentivized."),
        click.option("--alpha2", type=float, default=0.9, show_default=True, help="Activation probability, incentivized."),
        click.option("--zealous", type=float, default=0.3, show_default=True, help="Fraction of zealous (threshold 0) nodes."),
        click.option("--beta", type=float, default=0.5, show_default=True, help="Threshold as a fraction of degree."),
        click.option("--thresholds", "threshold_table", type=click.Path(dir_okay=False), default=None,
                     help="CSV degree,threshold,probability; overrides --zealous/--beta."),
        click.option("--costs", "cost_schedule", default="linear", show_default=True,
                     help="'linear' (c_k = k) or a CSV degree,cost."),
        click.option("--eps", type=float, default=1e-6, show_default=True, help="Bisection tolerance on s(q)."),
        click.option("--tol", "tolerance", type=float, default=1e-10, show_default=True, help="Fixed-point residual tolerance."),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--normalize", is_flag=True, help="Renormalize input pmfs instead of rejecting them."),
        click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout)."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def _config(kw, runs=10_000) -> io.RunConfig:
    return io.RunConfig(
        alpha1=kw["alpha1"],
        alpha2=kw["alpha2"],
        zealous_fraction=kw["zealous"],
        threshold_fraction=kw["beta"],
        cost_schedule=kw["cost_schedule"],
        threshold_table=kw["threshold_table"],
        eps=kw["eps"],
        tolerance=kw["tolerance"],
        seed=kw["seed"],
        runs=runs,
        normalize=kw["normalize"],
    )


def _source_options(fn):
    fn = click.option("--edges", type=click.Path(dir_okay=False), default=None, help="Edge list; its empirical pmf is used.")(fn)
    fn = click.option("--dist", "dist_csv", type=click.Path(dir_okay=False), default=None, help="CSV degree,probability.")(fn)
    return fn


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def cli(verbose):
    """Incentivized threshold cascades on random networks."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@cli.command()
@_source_options
@click.option("--q", "q_values", type=float, multiple=True, help="q value (repeatable). Default: 0, 0.1, ..., 1.")
@_model_options
def cascade(dist_csv, edges, q_values, **kw):
    """Fixed point u and expected cascade size s for each q (CSV q,u,s)."""
    cfg = _config(kw)
    model = cfg.model(io.load_distribution(dist_csv, edges, cfg.normalize))
    grid = q_values or tuple(np.round(np.linspace(0, 1, 11), 12).tolist())
    rows = []
    for q in grid:
        prof = profile(model, q, tol=cfg.tolerance)
        rows.append((float(q), prof.u, prof.size))
    io.write_csv(rows, io.CASCADE_COLUMNS, kw["out"])


@cli.command()
@_source_options
@click.option("--gamma", type=float, required=True, help="Minimum expected cascade size.")
@_model_options
def minimize(dist_csv, edges, gamma, **kw):
    """Cheapest incentive policy reaching cascade size gamma (JSON plan)."""
    cfg = _config(kw)
    model = cfg.model(io.load_distribution(dist_csv, edges, cfg.normalize))
    plan = minimize_cost(model, gamma, eps=cfg.eps, tol=cfg.tolerance)
    io.dump_json(io.cost_plan_to_dict(plan, gamma), kw["out"])


@cli.command()
@_source_options
@click.option("--budget", type=float, required=True, help="Expected incentive cost limit per node.")
@_model_options
def maximize(dist_csv, edges, budget, **kw):
    """Largest expected cascade within an incentive budget (JSON plan)."""
    cfg = _config(kw)
    model = cfg.model(io.load_distribution(dist_csv, edges, cfg.normalize))
    plan = maximize_cascade(model, budget, eps=cfg.eps, tol=cfg.tolerance)
    io.dump_json(io.size_plan_to_dict(plan, budget), kw["out"])


@cli.command()
@click.option("--edges", type=click.Path(dir_okay=False), default=None, help="Edge list to simulate on.")
@click.option("--generate", "generator", default=None, help="Generator spec config-model:n=<int>,dist=<csv>.")
@click.option("--scheme", type=click.Choice(sorted(SCHEME_ALIASES)), default="uniform", show_default=True)
@click.option("--q", "q_values", type=float, multiple=True, help="q value (repeatable) for --scheme.")
@click.option("--plan", "plan_path", type=click.Path(dir_okay=False), default=None, help="Plan JSON from minimize/maximize.")
@click.option("--runs", type=int, default=10_000, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--analytic", is_flag=True, help="Append analytic_size,analytic_cost columns.")
@_model_options
def simulate(edges, generator, scheme, q_values, plan_path, runs, workers, analytic, **kw):
    """Monte Carlo cascade statistics (CSV summary)."""
    cfg = _config(kw, runs=runs)
    if (edges is None) == (generator is None):
        raise click.UsageError("give exactly one of --edges or --generate")
    graph = read_edge_list(edges) if edges else io.parse_generator_spec(generator, cfg.seed, cfg.normalize)
    dist = from_graph(graph)
    thresholds, params = cfg.thresholds(), cfg.params()
    model = cfg.model(dist)

    jobs = []
    if plan_path:
        plan = io.load_plan(plan_path)
        policy = io.plan_policy(plan)
        jobs.append(("plan", io.plan_q(plan), policy))
    else:
        name = SCHEME_ALIASES[scheme]
        for q in q_values or (0.0, 0.25, 0.5, 0.75, 1.0):
            jobs.append((scheme, q, make_policy(name, q, dist)))

    rows = []
    for label, q, policy in jobs:
        summary = monte_carlo(graph, policy, thresholds, params, runs=cfg.runs, seed=cfg.seed, workers=workers)
        row = [label, float(q), summary.mean_size, summary.stderr_size, summary.mean_cost, summary.stderr_cost, cfg.runs, cfg.seed]
        if analytic:
            q_pol = edge_type2_probability(dist, policy)
            row += [profile(model, q_pol, tol=cfg.tolerance).size, expected_cost(model, policy, tol=cfg.tolerance)]
        rows.append(row)
    columns = io.SIMULATE_COLUMNS + (("analytic_size", "analytic_cost") if analytic else ())
    io.write_csv(rows, columns, kw["out"])


@cli.command()
@click.option("--dist", "dist_csv", type=click.Path(dir_okay=False), required=True, help="CSV degree,probability.")
@click.option("-n", "--n", "n", type=int, required=True, help="Number of nodes.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--normalize", is_flag=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Edge list output path.")
@click.option("--dist-out", type=click.Path(dir_okay=False), default=None, help="Also write the graph's empirical pmf.")
def generate(dist_csv, n, seed, normalize, out, dist_out):
    """Sample an erased configuration-model graph and write its edge list."""
    from .degree import read_degree_csv

    graph = generate_configuration_model(read_degree_csv(dist_csv, normalize=normalize), n, seed=seed)
    write_edge_list(graph, out)
    if dist_out:
        write_degree_csv(from_graph(graph), dist_out)
    click.echo(f"wrote {graph.n} nodes, {graph.edge_count} edges to {out}", err=True)


def _fail(kind, message, code, **extra):
    click.echo(json.dumps({"error": kind, "message": message, **extra}), err=True)
    return code


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="incascade", standalone_mode=False)
    except CascadeError as exc:
        extra = {}
        if getattr(exc, "boundary_case", None):
            extra["boundary_case"] = exc.boundary_case
        if getattr(exc, "last", None) is not None:
            extra.update(last=exc.last, residual=exc.residual)
        return _fail(type(exc).__name__, str(exc), exc.exit_code, **extra)
    except click.exceptions.Abort:
        return _fail("Aborted", "aborted", 1)
    except click.ClickException as exc:
        return _fail(type(exc).__name__, exc.format_message(), 3)
    except (ValueError, KeyError) as exc:
        return _fail(type(exc).__name__, str(exc), 3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
