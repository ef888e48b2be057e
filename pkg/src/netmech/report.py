"""Machine-readable run traces and CSV/plot-data emission.

Every number in the emitted tables is recomputable from the trace alone;
``replay_budgets`` re-derives the budget evolution from it and is used by
the verification suite. Output schemas are documented in
``docs/formats.md`` and consumed by the figure frontend.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path
from typing import Mapping, Sequence

from .sim import MetricsReport, SimState, compute_metrics


def initial_snapshot(state: SimState) -> dict:
    """Capture starting budgets/settings before a run, for replay."""
    return {
        "operators": {
            r: {
                "budget": op.budget,
                "increment": op.yearly_increment,
                "strategy": op.strategy.value,
            }
            for r, op in sorted(state.operators.items())
        },
        "central": {
            "budget": state.central.budget,
            "increment": state.central.yearly_increment,
            "alpha": state.central.investment_ratio,
        },
        "discount": state.discount,
        "horizon": state.horizon,
    }


def build_trace(name: str, mode: str, initial: dict, state: SimState) -> dict:
    metrics = compute_metrics(state)
    return {
        "scenario": name,
        "mode": mode,
        "initial": initial,
        "history": [asdict(rec) for rec in state.history],
        "years": [asdict(yr) for yr in state.years],
        "final_budgets": {
            "operators": {r: op.budget for r, op in sorted(state.operators.items())},
            "central": state.central.budget,
        },
        "metrics": metrics_dict(metrics),
    }


def metrics_dict(metrics: MetricsReport) -> dict:
    return {
        "local_benefit": dict(sorted(metrics.local_benefit.items())),
        "system_social_welfare": metrics.system_social_welfare,
        "subsidy_total": metrics.subsidy_total,
        "subsidy_efficiency": metrics.subsidy_efficiency,
        "per_year": metrics.per_year,
    }


def write_trace(trace: dict, path: str | Path):
    Path(path).write_text(json.dumps(trace, indent=2, sort_keys=True) + "\n")


def load_trace(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def replay_budgets(trace: dict) -> dict:
    """Re-derive every budget from the trace's initial state and history.

    Applies B_i^t = d*B_i^{t-1} - p_i^t - h_i^t + a_i^t for operators and
    B_0^t = d*B_0^{t-1} - p_0^t + a_0^t + surplus^t for the center, where
    surplus^t is the collected-payments excess over project costs.
    """
    discount = trace["initial"]["discount"]
    budgets = {
        r: op["budget"] for r, op in trace["initial"]["operators"].items()
    }
    central = trace["initial"]["central"]["budget"]
    surplus_by_year: dict[int, float] = {}
    for rec in trace["history"]:
        if rec["kind"] == "joint":
            over = sum(rec["payments"].values()) - rec["cost"]
            if over > 0:
                surplus_by_year[rec["year"]] = (
                    surplus_by_year.get(rec["year"], 0.0) + over
                )
    out = []
    for yr in trace["years"]:
        budgets = {
            r: discount * budgets[r]
            - yr["payments"].get(r, 0.0)
            - yr["local_spend"].get(r, 0.0)
            + yr["increments"].get(r, 0.0)
            for r in budgets
        }
        central = (
            discount * central
            - yr["subsidy"]
            + yr["central_increment"]
            + surplus_by_year.get(yr["year"], 0.0)
        )
        out.append(
            {"year": yr["year"], "operators": dict(budgets), "central": central}
        )
    return {"years": out}


# ---------------------------------------------------------------------------
# CSV emission


def _regions(trace: dict) -> list[str]:
    return sorted(trace["initial"]["operators"])


def emit_report(trace: dict, out_dir: str | Path) -> list[Path]:
    """Write the per-round table, per-year budgets and the metrics summary.

    Empty traces produce headers-only files. Column order is stable.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    regions = _regions(trace)
    written = []

    rounds_path = out_dir / "rounds.csv"
    with rounds_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        header = (
            ["year", "round", "kind", "operator", "projects", "cost", "subsidy", "excluded"]
            + [f"payment_{r}" for r in regions]
            + [f"benefit_{r}" for r in regions]
        )
        writer.writerow(header)
        for rec in trace["history"]:
            writer.writerow(
                [
                    rec["year"],
                    rec["round"],
                    rec["kind"],
                    rec.get("operator") or "",
                    ";".join(rec["projects"]),
                    rec["cost"],
                    rec["subsidy"],
                    ";".join(rec["excluded"]),
                ]
                + [rec["payments"].get(r, 0.0) for r in regions]
                + [rec["benefits"].get(r, 0.0) for r in regions]
            )
    written.append(rounds_path)

    budgets_path = out_dir / "budgets.csv"
    with budgets_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["year"]
            + [f"budget_{r}" for r in regions]
            + ["budget_central"]
            + [f"payment_{r}" for r in regions]
            + [f"local_spend_{r}" for r in regions]
            + ["subsidy"]
        )
        for yr in trace["years"]:
            writer.writerow(
                [yr["year"]]
                + [yr["budgets_end"].get(r, 0.0) for r in regions]
                + [yr["central_budget_end"]]
                + [yr["payments"].get(r, 0.0) for r in regions]
                + [yr["local_spend"].get(r, 0.0) for r in regions]
                + [yr["subsidy"]]
            )
    written.append(budgets_path)

    metrics_path = out_dir / "metrics.json"
    metrics_path.write_text(
        json.dumps(trace["metrics"], indent=2, sort_keys=True) + "\n"
    )
    written.append(metrics_path)
    return written


def emit_sweep(rows: Sequence[Mapping], out_dir: str | Path) -> list[Path]:
    """Write the sweep grid and the plot-ready series derived from it.

    ``rows`` carry one record per (central budget, alpha, strategy) cell
    with both mechanism and baseline metrics.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    regions = sorted(rows[0]["lb_ivcg"]) if rows else []
    written = []

    sweep_path = out_dir / "sweep.csv"
    with sweep_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["central_budget", "alpha", "strategy", "ssw_ivcg", "ssw_ld",
             "ssw_improvement_pct", "subsidy_total", "subsidy_efficiency"]
            + [f"lb_ivcg_{r}" for r in regions]
            + [f"lb_ld_{r}" for r in regions]
        )
        for row in rows:
            writer.writerow(
                [row["central_budget"], row["alpha"], row["strategy"],
                 row["ssw_ivcg"], row["ssw_ld"], row["ssw_improvement_pct"],
                 row["subsidy_total"], row["subsidy_efficiency"]]
                + [row["lb_ivcg"][r] for r in regions]
                + [row["lb_ld"][r] for r in regions]
            )
    written.append(sweep_path)

    welfare_path = out_dir / "plot_welfare_efficiency.csv"
    with welfare_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["central_budget", "alpha", "ssw_improvement_pct", "subsidy_efficiency"]
        )
        for row in rows:
            if row["strategy"] != "btr":
                continue
            writer.writerow(
                [row["central_budget"], row["alpha"],
                 row["ssw_improvement_pct"], row["subsidy_efficiency"]]
            )
    written.append(welfare_path)

    lb_path = out_dir / "plot_local_benefit.csv"
    with lb_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["central_budget", "alpha", "region", "lb_ivcg", "lb_ld"])
        for row in rows:
            if row["strategy"] != "btr":
                continue
            for r in regions:
                writer.writerow(
                    [row["central_budget"], row["alpha"], r,
                     row["lb_ivcg"][r], row["lb_ld"][r]]
                )
    written.append(lb_path)

    strat_path = out_dir / "plot_strategies.csv"
    with strat_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "alpha", "central_budget", "ssw"])
        for row in rows:
            writer.writerow(
                [row["strategy"], row["alpha"], row["central_budget"], row["ssw_ivcg"]]
            )
    written.append(strat_path)
    return written
