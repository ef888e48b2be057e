"""One round of the subsidized VCG mechanism.

Candidate filtering, welfare-maximizing selection, pivot payments, the
central subsidy that tops up the funding gap, the admissibility check
capping that subsidy at a fraction of project cost, and the three bidding
policies (truthful-clamped, single-minded, budget-proportional).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

Valuations = dict[str, dict[str, float]]  # operator -> project -> reported euros


class Strategy(str, Enum):
    BTR = "btr"  # truthful benefits clamped to [0, available budget]
    MINMAX = "minmax"  # bid only on the single best project
    PROPORTIONAL = "proportional"  # rescale benefits by budget / best benefit


@dataclass(frozen=True)
class StrategyPolicy:
    """An operator's reporting rule plus the private inputs it needs."""

    kind: Strategy
    benefits: Mapping[str, float]  # true benefit per project, euros/year
    available: float  # spendable budget this round (eta)
    budget: float | None = None  # B for minmax/proportional; defaults to eta
    literal_minmax: bool = False  # report max(B, b) instead of min(B, b)

    @property
    def cap(self) -> float:
        return self.available if self.budget is None else self.budget


@dataclass
class RoundOutcome:
    """Result of one mechanism round."""

    selected: str | None
    payments: dict[str, float]
    subsidy: float
    admissible: bool
    excluded_projects: list[str] = field(default_factory=list)
    reports: Valuations = field(default_factory=dict)

    def total_payment(self) -> float:
        return sum(self.payments.values())


def total_value(profile: Valuations, project: str) -> float:
    return sum(v.get(project, 0.0) for v in profile.values())


def candidate_set(profile: Valuations, costs: Mapping[str, float]) -> set[str]:
    """Projects whose total reported value strictly exceeds their cost."""
    return {x for x in costs if total_value(profile, x) > costs[x]}


def select_project(
    profile: Valuations,
    candidates: set[str],
    costs: Mapping[str, float] | None = None,
) -> str | None:
    """Candidate with the highest total reported value, or None if empty.

    Ties break to the higher value-minus-cost (lower cost), then to the
    lexicographically smallest project id, so selection is deterministic.
    """
    if not candidates:
        return None

    def rank(x: str):
        value = total_value(profile, x)
        cost = costs[x] if costs is not None else 0.0
        return (-value, -(value - cost), x)

    return min(candidates, key=rank)


def clarke_payments(
    profile: Valuations,
    costs: Mapping[str, float],
    selected: str | None,
) -> dict[str, float]:
    """Pivot payments: others' best value without operator i, minus their
    value at the actual selection.

    The exclusion run re-filters the candidate set without i's reports; an
    empty exclusion run contributes zero. Raw differences are floored at
    zero: re-filtering can drop the selected project from the exclusion
    run's candidate set, which would otherwise produce a negative charge.
    """
    payments = {op: 0.0 for op in profile}
    if selected is None:
        return payments
    for op in profile:
        others = {o: v for o, v in profile.items() if o != op}
        alt = select_project(others, candidate_set(others, costs), costs)
        without = total_value(others, alt) if alt is not None else 0.0
        with_op = total_value(others, selected)
        payments[op] = max(0.0, without - with_op)
    return payments


def subsidy(
    costs: Mapping[str, float],
    selected: str,
    payments: Mapping[str, float],
) -> float:
    """Central top-up covering the gap between cost and collected payments."""
    return max(costs[selected] - sum(payments.values()), 0.0)


def admissibility_check(
    subsidy_value: float,
    cost: float,
    alpha: float,
    central_budget: float = math.inf,
) -> bool:
    """True iff the subsidy is within alpha of the cost and affordable."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return subsidy_value <= alpha * cost and subsidy_value <= central_budget


def strategy_report(
    policy: StrategyPolicy, candidates: Sequence[str]
) -> dict[str, float]:
    """Reported valuations for one operator over the given projects."""
    benefits = {x: policy.benefits.get(x, 0.0) for x in candidates}
    if policy.kind == Strategy.BTR:
        return {
            x: min(max(b, 0.0), policy.available) for x, b in benefits.items()
        }
    if not benefits or max(benefits.values()) <= 0.0:
        return {x: 0.0 for x in benefits}
    if policy.kind == Strategy.MINMAX:
        best = min(x for x, b in benefits.items() if b == max(benefits.values()))
        pick = max if policy.literal_minmax else min
        report = {x: 0.0 for x in benefits}
        report[best] = pick(policy.cap, benefits[best])
        return report
    if policy.kind == Strategy.PROPORTIONAL:
        top = max(benefits.values())
        return {x: max(0.0, b / top * policy.cap) for x, b in benefits.items()}
    raise ValueError(f"unknown strategy: {policy.kind}")


def run_round(
    policies: Mapping[str, StrategyPolicy],
    costs: Mapping[str, float],
    budgets: Mapping[str, float],
    central_budget: float,
    alpha: float,
    pre_excluded: set[str] | None = None,
) -> RoundOutcome:
    """Run one selection cycle, excluding failed picks until one sticks.

    Each iteration rebuilds reports over the remaining projects, filters
    candidates, selects, prices, and checks both the subsidy admissibility
    and every payer's budget (a payment above an operator's budget also
    excludes the project). Returns the first admissible outcome, or a Null
    outcome carrying the full exclusion list.
    """
    excluded: list[str] = []
    banned = set(pre_excluded or ())
    while True:
        remaining = sorted(x for x in costs if x not in banned)
        reports: Valuations = {
            op: strategy_report(policy, remaining)
            for op, policy in sorted(policies.items())
        }
        open_costs = {x: costs[x] for x in remaining}
        candidates = candidate_set(reports, open_costs)
        selected = select_project(reports, candidates, open_costs)
        if selected is None:
            return RoundOutcome(
                selected=None,
                payments={op: 0.0 for op in policies},
                subsidy=0.0,
                admissible=False,
                excluded_projects=excluded,
                reports=reports,
            )
        payments = clarke_payments(reports, open_costs, selected)
        gap = subsidy(open_costs, selected, payments)
        feasible = admissibility_check(
            gap, open_costs[selected], alpha, central_budget
        ) and all(payments[op] <= budgets[op] + 1e-9 for op in payments)
        if feasible:
            return RoundOutcome(
                selected=selected,
                payments=payments,
                subsidy=gap,
                admissible=True,
                excluded_projects=excluded,
                reports=reports,
            )
        excluded.append(selected)
        banned.add(selected)
