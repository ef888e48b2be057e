"""Multi-year planning loop: yearly mechanism rounds, local design, budgets.

Each year the mechanism repeatedly selects one project until nothing
admissible remains, operators then spend leftover budget on projects in
their own territory, and budgets roll over with a discount factor and a
yearly increment. A local-design-only baseline reuses the subsidies of a
paired mechanism run so both sides see the same resources.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .demand import DemandParams, RevenueModel, TripDemand
from .mechanism import RoundOutcome, Strategy, StrategyPolicy, run_round
from .network import (
    EdgeStatus,
    MobilityNetwork,
    NetEdge,
    advance_construction,
)

NO_SUBSIDY = "no-subsidy"

#: Exact search bound for the local-design knapsack; above this a greedy
#: benefit-per-cost heuristic with single-swap improvement takes over.
EXACT_SEARCH_LIMIT = 15


class SimError(ValueError):
    pass


@dataclass
class OperatorState:
    region: str
    budget: float
    yearly_increment: float
    strategy: Strategy = Strategy.BTR
    spent_joint: float = 0.0
    spent_local: float = 0.0


@dataclass
class CentralState:
    budget: float
    yearly_increment: float
    investment_ratio: float = 1.0
    spent_subsidy: float = 0.0


@dataclass
class ProjectRecord:
    """One history entry: a mechanism round or a local-design action."""

    year: int
    round: int  # 0-based round within the year; -1 for local design
    kind: str  # "joint" | "local" | "null"
    projects: list[str]
    cost: float
    payments: dict[str, float]
    subsidy: float
    benefits: dict[str, float]  # true per-region benefit at selection time
    excluded: list[str]
    operator: str | None = None  # local-design owner


@dataclass
class YearRecord:
    """Per-year budget bookkeeping, sufficient to replay the update rule."""

    year: int
    payments: dict[str, float]  # p_i
    local_spend: dict[str, float]  # h_i
    increments: dict[str, float]  # a_i
    budgets_end: dict[str, float]  # B_i at year end
    subsidy: float  # p_0
    central_increment: float
    central_budget_end: float
    allocated: dict[str, float] = field(default_factory=dict)  # LD runs only


@dataclass
class SimState:
    network: MobilityNetwork
    params: DemandParams
    demands: list[TripDemand]
    candidates: dict[str, NetEdge]  # open project ids -> edge
    operators: dict[str, OperatorState]  # keyed by region
    central: CentralState
    discount: float
    horizon: int
    construction_years: int = 0
    literal_minmax: bool = False
    year: int = 0
    history: list[ProjectRecord] = field(default_factory=list)
    years: list[YearRecord] = field(default_factory=list)

    def committed_pending(self) -> list[NetEdge]:
        """Edges committed but still under construction (valuation view)."""
        return [
            e
            for e in self.network.edges.values()
            if e.status == EdgeStatus.UNDER_CONSTRUCTION
        ]

    def metric_breakdown(self) -> "MetricsReport":
        return compute_metrics(self)


@dataclass
class MetricsReport:
    local_benefit: dict[str, float]
    system_social_welfare: float
    subsidy_total: float
    subsidy_efficiency: float | str  # euros ratio, or the NO_SUBSIDY marker
    per_year: list[dict]


# ---------------------------------------------------------------------------
# valuation helpers


def _benefit_fn(state: SimState) -> Callable[[Iterable[NetEdge]], dict[str, float]]:
    """Per-region benefit of adding a project set to the committed network.

    Projects already committed this cycle (still under construction) count
    as present for valuation, so substitutable edges are not double-picked.
    """
    model = RevenueModel(state.network, state.params, state.demands)
    pending = state.committed_pending()
    base = model.region_revenues(pending)

    def benefits(projects: Iterable[NetEdge]) -> dict[str, float]:
        combined = list(pending) + list(projects)
        delta = model.region_revenues(combined) - base
        return {r: float(delta[i]) for r, i in model.region_of.items()}

    return benefits


def _commit(state: SimState, project_id: str):
    edge = state.candidates.pop(project_id)
    if state.construction_years > 0:
        state.network = state.network.with_edge_status(
            project_id, EdgeStatus.UNDER_CONSTRUCTION, state.construction_years
        )
    else:
        state.network = state.network.with_edge_status(
            project_id, EdgeStatus.IMPLEMENTED, 0
        )
    return edge


def eligible_projects(state: SimState, region: str) -> dict[str, NetEdge]:
    """Open candidates in the operator's territory: intra-regional edges
    plus cross-border edges touching the region."""
    out = {}
    for pid, edge in state.candidates.items():
        if region in state.network.edge_regions(edge):
            out[pid] = edge
    return out


# ---------------------------------------------------------------------------
# local design


def local_design(
    benefit_of: Callable[[Iterable[NetEdge]], float],
    eligible: Mapping[str, NetEdge],
    budget_cap: float,
) -> tuple[list[str], float]:
    """Pick a budget-feasible project subset maximizing the set benefit.

    Benefits are evaluated set-wise (shortest paths interact, so they are
    not additive). Exact subset enumeration up to ``EXACT_SEARCH_LIMIT``
    projects; greedy benefit-per-cost with single-swap improvement beyond.
    Returns (sorted project ids, total spend).
    """
    affordable = {
        pid: e for pid, e in eligible.items() if e.cost <= budget_cap + 1e-9
    }
    if not affordable:
        return [], 0.0
    ids = sorted(affordable)
    if len(ids) <= EXACT_SEARCH_LIMIT:
        best_ids: tuple[str, ...] = ()
        best_cost = 0.0
        best_value = 0.0
        # subsets enumerated small-to-large, lexicographically: ties keep the
        # earlier (smaller, cheaper) subset, so the empty set wins at value 0
        for r in range(len(ids) + 1):
            for combo in itertools.combinations(ids, r):
                cost = sum(affordable[p].cost for p in combo)
                if cost > budget_cap + 1e-9:
                    continue
                value = benefit_of([affordable[p] for p in combo])
                if value > best_value + 1e-12 or (
                    abs(value - best_value) <= 1e-12 and cost < best_cost - 1e-9
                ):
                    best_ids, best_cost, best_value = combo, cost, value
        return list(best_ids), best_cost
    return _greedy_design(benefit_of, affordable, budget_cap)


def _greedy_design(
    benefit_of: Callable[[Iterable[NetEdge]], float],
    affordable: Mapping[str, NetEdge],
    budget_cap: float,
) -> tuple[list[str], float]:
    chosen: list[str] = []
    spent = 0.0
    improved = True
    while improved:
        improved = False
        base = benefit_of([affordable[p] for p in chosen])
        scored = []
        for pid, e in affordable.items():
            if pid in chosen or spent + e.cost > budget_cap + 1e-9:
                continue
            gain = benefit_of([affordable[p] for p in chosen] + [e]) - base
            if gain > 1e-9:
                scored.append((gain / e.cost, gain, pid))
        if scored:
            scored.sort(key=lambda t: (-t[0], -t[1], t[2]))
            pid = scored[0][2]
            chosen.append(pid)
            spent += affordable[pid].cost
            improved = True
    # single-swap improvement pass
    current = benefit_of([affordable[p] for p in chosen])
    for out_id in list(chosen):
        for in_id in sorted(affordable):
            if in_id in chosen:
                continue
            trial = [p for p in chosen if p != out_id] + [in_id]
            cost = sum(affordable[p].cost for p in trial)
            if cost > budget_cap + 1e-9:
                continue
            value = benefit_of([affordable[p] for p in trial])
            if value > current + 1e-9:
                chosen = trial
                spent = cost
                current = value
                break
    return sorted(chosen), spent


# ---------------------------------------------------------------------------
# yearly loops


def run_year_ivcg(state: SimState) -> SimState:
    """Advance one year: mechanism rounds, local design, budget update."""
    if state.year >= state.horizon:
        raise SimError("planning horizon exhausted")
    year = state.year + 1
    avail = {
        r: state.discount * op.budget + op.yearly_increment
        for r, op in state.operators.items()
    }
    start_avail = dict(avail)
    central_avail = (
        state.discount * state.central.budget + state.central.yearly_increment
    )
    payments_total = {r: 0.0 for r in state.operators}
    local_spend = {r: 0.0 for r in state.operators}
    subsidy_total = 0.0
    banned: set[str] = set()

    round_no = 0
    while state.candidates:
        benefits_of = _benefit_fn(state)
        per_project = {
            pid: benefits_of([edge]) for pid, edge in sorted(state.candidates.items())
        }
        policies = {
            r: StrategyPolicy(
                kind=op.strategy,
                benefits={pid: per_project[pid][r] for pid in per_project},
                available=avail[r],
                literal_minmax=state.literal_minmax,
            )
            for r, op in state.operators.items()
        }
        costs = {pid: e.cost for pid, e in state.candidates.items()}
        outcome = run_round(
            policies,
            costs,
            avail,
            central_avail,
            state.central.investment_ratio,
            pre_excluded=banned,
        )
        banned.update(outcome.excluded_projects)
        if outcome.selected is None:
            state.history.append(
                ProjectRecord(
                    year=year,
                    round=round_no,
                    kind="null",
                    projects=[],
                    cost=0.0,
                    payments=dict(outcome.payments),
                    subsidy=0.0,
                    benefits={r: 0.0 for r in state.operators},
                    excluded=list(outcome.excluded_projects),
                )
            )
            break
        selected = outcome.selected
        record = ProjectRecord(
            year=year,
            round=round_no,
            kind="joint",
            projects=[selected],
            cost=state.candidates[selected].cost,
            payments=dict(outcome.payments),
            subsidy=outcome.subsidy,
            benefits=per_project[selected],
            excluded=list(outcome.excluded_projects),
        )
        state.history.append(record)
        for r, p in outcome.payments.items():
            avail[r] -= p
            payments_total[r] += p
            state.operators[r].spent_joint += p
        central_avail -= outcome.subsidy
        subsidy_total += outcome.subsidy
        state.central.spent_subsidy += outcome.subsidy
        # payments above cost accrue to the central budget (no redistribution)
        surplus = sum(outcome.payments.values()) - record.cost
        if surplus > 0:
            central_avail += surplus
        _commit(state, selected)
        round_no += 1

    for region in sorted(state.operators):
        _run_local_design(state, year, region, avail, local_spend, extra_funds=0.0)

    _close_year(
        state,
        year,
        start_avail,
        avail,
        payments_total,
        local_spend,
        subsidy_total,
        central_avail,
    )
    return state


def _run_local_design(
    state: SimState,
    year: int,
    region: str,
    avail: dict[str, float],
    local_spend: dict[str, float],
    extra_funds: float,
):
    eligible = eligible_projects(state, region)
    if not eligible:
        return
    benefits_of = _benefit_fn(state)

    def own_benefit(projects: Iterable[NetEdge]) -> float:
        return benefits_of(projects)[region]

    cap = avail[region] + extra_funds
    chosen, spend = local_design(own_benefit, eligible, cap)
    if not chosen:
        return
    set_benefits = benefits_of([eligible[p] for p in chosen])
    op_spend = max(0.0, spend - extra_funds)
    state.history.append(
        ProjectRecord(
            year=year,
            round=-1,
            kind="local",
            projects=list(chosen),
            cost=spend,
            payments={},
            subsidy=0.0,
            benefits=set_benefits,
            excluded=[],
            operator=region,
        )
    )
    avail[region] -= op_spend
    local_spend[region] += op_spend
    state.operators[region].spent_local += op_spend
    for pid in chosen:
        _commit(state, pid)


def _close_year(
    state: SimState,
    year: int,
    start_avail: dict[str, float],
    avail: dict[str, float],
    payments_total: dict[str, float],
    local_spend: dict[str, float],
    subsidy_total: float,
    central_avail: float,
    allocated: dict[str, float] | None = None,
):
    for r, op in state.operators.items():
        op.budget = avail[r]
        if op.budget < -1e-6:
            raise SimError(f"operator {r} budget went negative")
        op.budget = max(op.budget, 0.0)
    state.central.budget = max(central_avail, 0.0)
    state.years.append(
        YearRecord(
            year=year,
            payments=dict(payments_total),
            local_spend=dict(local_spend),
            increments={
                r: op.yearly_increment for r, op in state.operators.items()
            },
            budgets_end={r: op.budget for r, op in state.operators.items()},
            subsidy=subsidy_total,
            central_increment=state.central.yearly_increment,
            central_budget_end=state.central.budget,
            allocated=dict(allocated or {}),
        )
    )
    state.network = advance_construction(state.network)
    state.year = year


def run_ivcg(state: SimState) -> SimState:
    """Run the full planning horizon of mechanism years."""
    while state.year < state.horizon:
        run_year_ivcg(state)
    return state


def run_baseline_ld(
    state: SimState,
    subsidy_allocation: Sequence[Mapping[str, float]],
    paired_subsidies: Sequence[float] | None = None,
) -> SimState:
    """Local-design-only horizon reusing a paired run's yearly subsidies.

    ``subsidy_allocation[t]`` maps each region to the extra funds it may
    spend in year t+1; per-year totals must equal the paired run's subsidy
    (``paired_subsidies``) when given. Allocated funds not spent in their
    year are forfeited, mirroring the subsidy's project-bound nature.
    """
    if len(subsidy_allocation) < state.horizon:
        raise SimError("subsidy allocation must cover every year")
    if paired_subsidies is not None:
        for t, expect in enumerate(paired_subsidies):
            got = sum(subsidy_allocation[t].values())
            if not math.isclose(got, expect, rel_tol=0, abs_tol=1e-6):
                raise SimError(
                    f"year {t + 1}: allocated subsidies {got} != paired {expect}"
                )
    while state.year < state.horizon:
        year = state.year + 1
        avail = {
            r: state.discount * op.budget + op.yearly_increment
            for r, op in state.operators.items()
        }
        start_avail = dict(avail)
        central_avail = (
            state.discount * state.central.budget + state.central.yearly_increment
        )
        local_spend = {r: 0.0 for r in state.operators}
        alloc = subsidy_allocation[year - 1]
        for region in sorted(state.operators):
            _run_local_design(
                state,
                year,
                region,
                avail,
                local_spend,
                extra_funds=float(alloc.get(region, 0.0)),
            )
        _close_year(
            state,
            year,
            start_avail,
            avail,
            {r: 0.0 for r in state.operators},
            local_spend,
            0.0,
            central_avail,
            allocated=dict(alloc),
        )
    return state


def compute_metrics(state: SimState) -> MetricsReport:
    """Aggregate local benefits, welfare and subsidy efficiency.

    Benefits are the values measured at selection time (marginal against
    the then-current network), summed over all committed projects.
    """
    lb = {r: 0.0 for r in state.operators}
    per_year: dict[int, dict] = {}
    subsidy_total = 0.0
    for rec in state.history:
        if rec.kind == "null":
            continue
        slot = per_year.setdefault(
            rec.year,
            {"year": rec.year, "welfare": 0.0, "subsidy": 0.0, "local_benefit": {}},
        )
        welfare = sum(rec.benefits.get(r, 0.0) for r in state.operators)
        slot["welfare"] += welfare
        slot["subsidy"] += rec.subsidy
        for r in state.operators:
            lb[r] += rec.benefits.get(r, 0.0)
            slot["local_benefit"][r] = slot["local_benefit"].get(r, 0.0) + rec.benefits.get(r, 0.0)
        subsidy_total += rec.subsidy
    ssw = sum(lb.values())
    efficiency: float | str
    if subsidy_total > 0:
        efficiency = ssw / subsidy_total
    else:
        efficiency = NO_SUBSIDY
    return MetricsReport(
        local_benefit=lb,
        system_social_welfare=ssw,
        subsidy_total=subsidy_total,
        subsidy_efficiency=efficiency,
        per_year=[per_year[y] for y in sorted(per_year)],
    )


# ---------------------------------------------------------------------------
# subsidy allocators for the baseline


def allocate_by_region_share(state: SimState) -> list[dict[str, float]]:
    """Split each year's subsidies by the subsidized projects' region km.

    Each joint project's subsidy goes to regions in proportion to the
    project edge's length attribution (cross-border edges half/half).
    """
    per_year: list[dict[str, float]] = [
        {r: 0.0 for r in state.operators} for _ in range(state.horizon)
    ]
    for rec in state.history:
        if rec.kind != "joint" or rec.subsidy <= 0:
            continue
        pid = rec.projects[0]
        edge = state.network.edges[pid]
        ra, rb = state.network.edge_regions(edge)
        shares = {ra: 0.5, rb: 0.5} if ra != rb else {ra: 1.0}
        for r, w in shares.items():
            per_year[rec.year - 1][r] += w * rec.subsidy
    return per_year


def allocate_equal(state: SimState) -> list[dict[str, float]]:
    n = len(state.operators)
    return [
        {r: yr.subsidy / n for r in state.operators} for yr in _year_subsidies(state)
    ]


def allocate_by_population(state: SimState) -> list[dict[str, float]]:
    pop = {r: 0.0 for r in state.operators}
    for city in state.network.cities.values():
        pop[city.region] = pop.get(city.region, 0.0) + city.population
    total = sum(pop.values())
    return [
        {r: yr.subsidy * pop[r] / total for r in state.operators}
        for yr in _year_subsidies(state)
    ]


def _year_subsidies(state: SimState) -> list[YearRecord]:
    if len(state.years) < state.horizon:
        raise SimError("paired run incomplete: missing year records")
    return state.years[: state.horizon]


ALLOCATORS = {
    "region-share": allocate_by_region_share,
    "equal": allocate_equal,
    "population": allocate_by_population,
}
