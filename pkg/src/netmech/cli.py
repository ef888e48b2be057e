"""Command line interface: run, baseline, sweep, validate, report.

Exit codes: 0 success, 1 input error, 2 runtime invariant violation.
The output directory comes from ``--out``; the ``NETMECH_OUT`` environment
variable overrides the default when the flag is not given.
"""
from __future__ import annotations

import functools
import os
import sys
from pathlib import Path

import click

from .demand import DemandError
from .mechanism import Strategy
from .network import NetworkError
from .report import (
    build_trace,
    emit_report,
    emit_sweep,
    initial_snapshot,
    load_trace,
    write_trace,
)
from .scenario import Scenario, ScenarioError, load_scenario
from .sim import SimError, compute_metrics, run_baseline_ld, run_ivcg

DEFAULT_OUT = "out"


def _out_dir(out: str | None) -> Path:
    if out is not None:
        return Path(out)
    return Path(os.environ.get("NETMECH_OUT", DEFAULT_OUT))


def _guard(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ScenarioError as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(1)
        except (SimError, NetworkError, DemandError) as exc:
            click.echo(f"invariant violation: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
def cli():
    """Multi-regional network design: mechanism runs and baselines."""


@cli.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", type=float, default=None, help="Override the investment ratio.")
@click.option("--central-budget", type=float, default=None, help="Override the central budget.")
@click.option("--out", type=click.Path(file_okay=False), default=None)
@_guard
def run(scenario_path, alpha, central_budget, out):
    """Run the yearly mechanism over the planning horizon."""
    scenario = load_scenario(scenario_path)
    state = scenario.build_state(alpha=alpha, central_budget=central_budget)
    initial = initial_snapshot(state)
    run_ivcg(state)
    trace = build_trace(scenario.config.name, "ivcg", initial, state)
    out_dir = _out_dir(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace(trace, out_dir / "trace.json")
    emit_report(trace, out_dir)
    metrics = trace["metrics"]
    click.echo(
        f"{scenario.config.name}: SSW {metrics['system_social_welfare']:.1f} EUR/yr, "
        f"subsidies {metrics['subsidy_total']:.1f} EUR"
    )
    click.echo(f"outputs in {out_dir}")


@cli.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--trace", "trace_path", required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Trace of the paired mechanism run whose subsidies are reused.",
)
@click.option(
    "--allocator", type=click.Choice(["region-share", "equal", "population"]),
    default="region-share", show_default=True,
)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@_guard
def baseline(scenario_path, trace_path, allocator, out):
    """Run the local-design baseline paired with a mechanism trace."""
    scenario = load_scenario(scenario_path)
    paired = load_trace(trace_path)
    if paired.get("mode") != "ivcg":
        raise ScenarioError("baseline pairing requires an ivcg trace", trace_path)
    allocation = _allocation_from_trace(scenario, paired, allocator)
    state = scenario.build_state(
        alpha=paired["initial"]["central"]["alpha"],
        central_budget=paired["initial"]["central"]["budget"],
    )
    initial = initial_snapshot(state)
    paired_subsidies = [yr["subsidy"] for yr in paired["years"]]
    run_baseline_ld(state, allocation, paired_subsidies)
    trace = build_trace(scenario.config.name, "ld", initial, state)
    trace["allocation"] = allocation
    out_dir = _out_dir(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace(trace, out_dir / "ld_trace.json")
    emit_report(trace, out_dir)
    click.echo(
        f"{scenario.config.name} (LD): SSW "
        f"{trace['metrics']['system_social_welfare']:.1f} EUR/yr"
    )


@cli.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--central-budget", "central_budgets", type=float, multiple=True)
@click.option("--alpha", "alphas", type=float, multiple=True)
@click.option(
    "--strategy", "strategy_names", multiple=True,
    type=click.Choice([s.value for s in Strategy]),
    help="Strategy applied to every operator; repeat for comparisons.",
)
@click.option("--out", type=click.Path(file_okay=False), default=None)
@_guard
def sweep(scenario_path, central_budgets, alphas, strategy_names, out):
    """Run a grid over central budgets, investment ratios and strategies."""
    scenario = load_scenario(scenario_path)
    budgets = list(central_budgets) or [scenario.config.central_budget]
    ratios = list(alphas) or [scenario.config.alpha]
    strategies = list(strategy_names) or [Strategy.BTR.value]
    rows = []
    for budget in budgets:
        for alpha in ratios:
            for strat in strategies:
                rows.append(_sweep_cell(scenario, budget, alpha, strat))
    out_dir = _out_dir(out)
    written = emit_sweep(rows, out_dir)
    click.echo(f"{len(rows)} sweep cells -> {written[0]}")


def _sweep_cell(scenario: Scenario, budget: float, alpha: float, strat: str) -> dict:
    regions = [op["region"] for op in scenario.config.operators]
    assigned = {r: Strategy(strat) for r in regions}
    state = scenario.build_state(
        alpha=alpha, central_budget=budget, strategies=assigned
    )
    run_ivcg(state)
    from .sim import allocate_by_region_share

    allocation = allocate_by_region_share(state)
    metrics = compute_metrics(state)
    ld_state = scenario.build_state(alpha=alpha, central_budget=budget)
    run_baseline_ld(ld_state, allocation, [yr.subsidy for yr in state.years])
    ld_metrics = compute_metrics(ld_state)
    ssw_i = metrics.system_social_welfare
    ssw_l = ld_metrics.system_social_welfare
    improvement = "" if ssw_l == 0 else (ssw_i - ssw_l) / abs(ssw_l) * 100.0
    return {
        "central_budget": budget,
        "alpha": alpha,
        "strategy": strat,
        "ssw_ivcg": ssw_i,
        "ssw_ld": ssw_l,
        "ssw_improvement_pct": improvement,
        "subsidy_total": metrics.subsidy_total,
        "subsidy_efficiency": metrics.subsidy_efficiency,
        "lb_ivcg": dict(metrics.local_benefit),
        "lb_ld": dict(ld_metrics.local_benefit),
    }


@cli.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@_guard
def validate(scenario_path):
    """Load a scenario and report its shape; non-zero exit on any problem."""
    scenario = load_scenario(scenario_path)
    net = scenario.network
    click.echo(
        f"{scenario.config.name}: {len(net.regions)} regions, "
        f"{len(net.cities)} cities, {len(net.edges)} edges, "
        f"{len(scenario.candidate_ids)} candidate projects, "
        f"{len(scenario.demands)} demand pairs"
    )


@cli.command("report")
@click.argument("trace_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@_guard
def report_cmd(trace_path, out):
    """Regenerate the CSV tables from an existing trace."""
    trace = load_trace(trace_path)
    written = emit_report(trace, _out_dir(out))
    for path in written:
        click.echo(str(path))


def _allocation_from_trace(
    scenario: Scenario, trace: dict, kind: str
) -> list[dict[str, float]]:
    """Split each year's subsidies across regions from the trace alone."""
    regions = sorted(r["region"] for r in scenario.config.operators)
    horizon = trace["initial"]["horizon"]
    per_year: list[dict[str, float]] = [
        {r: 0.0 for r in regions} for _ in range(horizon)
    ]
    if kind == "region-share":
        for rec in trace["history"]:
            if rec["kind"] != "joint" or rec["subsidy"] <= 0:
                continue
            edge = scenario.network.edges.get(rec["projects"][0])
            if edge is None:
                raise ScenarioError(
                    f"trace project {rec['projects'][0]} not in scenario network"
                )
            ra, rb = scenario.network.edge_regions(edge)
            shares = {ra: 0.5, rb: 0.5} if ra != rb else {ra: 1.0}
            for r, w in shares.items():
                per_year[rec["year"] - 1][r] += w * rec["subsidy"]
        return per_year
    if kind == "equal":
        weights = {r: 1.0 / len(regions) for r in regions}
    else:  # population
        pop = {r: 0.0 for r in regions}
        for city in scenario.network.cities.values():
            pop[city.region] += city.population
        total = sum(pop.values())
        weights = {r: pop[r] / total for r in regions}
    for yr in trace["years"]:
        for r in regions:
            per_year[yr["year"] - 1][r] += weights[r] * yr["subsidy"]
    return per_year


def main():
    cli(prog_name="netmech")


if __name__ == "__main__":
    main()
