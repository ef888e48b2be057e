import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netmech.mechanism import (
    Strategy,
    StrategyPolicy,
    admissibility_check,
    candidate_set,
    clarke_payments,
    run_round,
    select_project,
    strategy_report,
    subsidy,
)


# ---------------------------------------------------------------------------
# candidate filtering


def test_exact_cost_equality_excluded():
    profile = {"op1": {"A": 7.0}, "op2": {"A": 5.0}}
    assert candidate_set(profile, {"A": 12.0}) == set()


def test_all_zero_reports_empty_set():
    profile = {"op1": {"A": 0.0, "B": 0.0}}
    assert candidate_set(profile, {"A": 3.0, "B": 1.0}) == set()


def test_candidate_set_worked_example():
    profile = {"op1": {"A": 10.0, "B": 3.0}, "op2": {"A": 5.0, "B": 4.0}}
    costs = {"A": 12.0, "B": 8.0}
    assert candidate_set(profile, costs) == {"A"}


# ---------------------------------------------------------------------------
# selection


def test_select_empty_is_none():
    assert select_project({}, set()) is None


def test_select_single_candidate():
    profile = {"op1": {"A": 5.0}}
    assert select_project(profile, {"A"}) == "A"


def test_select_argmax():
    profile = {"op1": {"A": 15.0, "B": 20.0}}
    assert select_project(profile, {"A", "B"}) == "B"


def test_select_tie_prefers_lower_cost():
    profile = {"op1": {"A": 10.0, "B": 10.0}}
    costs = {"A": 8.0, "B": 3.0}
    assert select_project(profile, {"A", "B"}, costs) == "B"


def test_select_full_tie_prefers_smaller_id():
    profile = {"op1": {"A": 10.0, "B": 10.0}}
    costs = {"A": 5.0, "B": 5.0}
    assert select_project(profile, {"A", "B"}, costs) == "A"


# ---------------------------------------------------------------------------
# payments


def test_single_operator_pays_nothing():
    profile = {"op1": {"A": 10.0}}
    costs = {"A": 5.0}
    selected = select_project(profile, candidate_set(profile, costs), costs)
    assert clarke_payments(profile, costs, selected) == {"op1": 0.0}


def test_clarke_worked_example():
    profile = {"op1": {"A": 10.0, "B": 0.0}, "op2": {"A": 4.0, "B": 5.0}}
    costs = {"A": 1.0, "B": 1.0}
    selected = select_project(profile, candidate_set(profile, costs), costs)
    assert selected == "A"
    payments = clarke_payments(profile, costs, selected)
    assert payments == {"op1": 1.0, "op2": 0.0}


def test_non_pivotal_operator_pays_zero():
    profile = {"op1": {"A": 10.0}, "op2": {"A": 4.0}}
    costs = {"A": 5.0}
    payments = clarke_payments(profile, costs, "A")
    assert payments == {"op1": 0.0, "op2": 0.0}


def test_null_selection_pays_zero():
    profile = {"op1": {"A": 1.0}}
    assert clarke_payments(profile, {"A": 5.0}, None) == {"op1": 0.0}


def test_payment_floored_when_refiltering_drops_winner():
    # without op1 the selected project leaves the candidate set but a
    # cheaper one remains; the raw pivot difference is negative
    profile = {"op1": {"A": 20.0, "B": 0.0}, "op2": {"A": 5.0, "B": 3.0}}
    costs = {"A": 10.0, "B": 2.5}
    selected = select_project(profile, candidate_set(profile, costs), costs)
    assert selected == "A"
    payments = clarke_payments(profile, costs, selected)
    # without op1 only B stays a candidate: raw p1 = v2(B) - v2(A) = -2
    assert payments["op1"] == 0.0
    assert all(p >= 0.0 for p in payments.values())


# ---------------------------------------------------------------------------
# subsidy / admissibility


def test_subsidy_gap():
    assert subsidy({"A": 20.0}, "A", {"op1": 1.0}) == 19.0


def test_subsidy_floor_at_zero():
    assert subsidy({"A": 20.0}, "A", {"op1": 25.0}) == 0.0
    assert subsidy({"A": 0.0}, "A", {}) == 0.0


def test_admissibility_worked_example():
    assert not admissibility_check(19.0, 20.0, 0.8)


def test_admissibility_zero_subsidy_always_ok():
    assert admissibility_check(0.0, 20.0, 0.0)


def test_admissibility_boundary_is_inclusive():
    assert admissibility_check(16.0, 20.0, 0.8)


def test_admissibility_respects_central_budget():
    assert not admissibility_check(10.0, 20.0, 1.0, central_budget=9.0)
    assert admissibility_check(10.0, 20.0, 1.0, central_budget=10.0)


def test_admissibility_rejects_bad_alpha():
    with pytest.raises(ValueError):
        admissibility_check(1.0, 2.0, 1.2)


# ---------------------------------------------------------------------------
# strategies


def test_btr_clamps_to_budget_band():
    policy = StrategyPolicy(Strategy.BTR, {"A": -5.0, "B": 30.0}, available=10.0)
    assert strategy_report(policy, ["A", "B"]) == {"A": 0.0, "B": 10.0}


def test_minmax_single_minded_clamped():
    policy = StrategyPolicy(
        Strategy.MINMAX, {"A": 8.0, "B": 12.0}, available=20.0, budget=20.0
    )
    assert strategy_report(policy, ["A", "B"]) == {"A": 0.0, "B": 12.0}


def test_minmax_literal_reading_reports_budget():
    policy = StrategyPolicy(
        Strategy.MINMAX,
        {"A": 8.0, "B": 12.0},
        available=20.0,
        budget=20.0,
        literal_minmax=True,
    )
    assert strategy_report(policy, ["A", "B"]) == {"A": 0.0, "B": 20.0}


def test_proportional_rescales_by_budget():
    policy = StrategyPolicy(
        Strategy.PROPORTIONAL, {"A": 6.0, "B": 12.0}, available=20.0, budget=20.0
    )
    assert strategy_report(policy, ["A", "B"]) == {"A": 10.0, "B": 20.0}


@pytest.mark.parametrize("kind", list(Strategy))
def test_nonpositive_benefits_report_zero(kind):
    policy = StrategyPolicy(kind, {"A": -4.0, "B": 0.0}, available=10.0)
    assert strategy_report(policy, ["A", "B"]) == {"A": 0.0, "B": 0.0}


def test_missing_benefit_treated_as_zero():
    policy = StrategyPolicy(Strategy.BTR, {"A": 3.0}, available=10.0)
    assert strategy_report(policy, ["A", "B"]) == {"A": 3.0, "B": 0.0}


# ---------------------------------------------------------------------------
# full round


def _btr(benefits, available=100.0):
    return StrategyPolicy(Strategy.BTR, benefits, available=available)


def test_round_with_no_candidates_is_null():
    policies = {"op1": _btr({"A": 1.0})}
    outcome = run_round(policies, {"A": 5.0}, {"op1": 100.0}, 100.0, 1.0)
    assert outcome.selected is None
    assert outcome.payments == {"op1": 0.0}
    assert outcome.subsidy == 0.0
    assert not outcome.admissible


def test_round_admissible_first_pick_matches_composition():
    policies = {
        "op1": _btr({"A": 10.0, "B": 0.0}),
        "op2": _btr({"A": 4.0, "B": 5.0}),
    }
    costs = {"A": 1.0, "B": 1.0}
    outcome = run_round(policies, costs, {"op1": 100.0, "op2": 100.0}, 100.0, 1.0)
    assert outcome.selected == "A"
    assert outcome.payments == {"op1": 1.0, "op2": 0.0}
    assert outcome.subsidy == 0.0
    assert outcome.admissible
    assert outcome.excluded_projects == []


def test_round_excludes_inadmissible_pick_and_continues():
    policies = {
        "op1": _btr({"A": 30.0, "B": 1.0, "C": 9.0}),
        "op2": _btr({"A": 1.0, "B": 12.0, "C": 1.0}),
    }
    costs = {"A": 25.0, "B": 5.0, "C": 4.0}
    # A needs a 14 subsidy, above 0.5 * 25; B is then covered by op2's pivot
    outcome = run_round(
        policies, costs, {"op1": 100.0, "op2": 100.0}, 100.0, alpha=0.5
    )
    assert outcome.excluded_projects == ["A"]
    assert outcome.selected == "B"
    assert outcome.payments["op2"] == pytest.approx(8.0)
    assert outcome.payments["op1"] == 0.0
    assert outcome.subsidy == 0.0


def test_round_excludes_pick_whose_payment_exceeds_budget():
    policies = {
        "op1": _btr({"B": 1.0, "C": 9.0}),
        "op2": _btr({"B": 12.0, "C": 1.0}),
    }
    costs = {"B": 5.0, "C": 4.0}
    # op2 would owe 8 on B but only has 5
    outcome = run_round(
        policies, costs, {"op1": 100.0, "op2": 5.0}, 100.0, alpha=1.0
    )
    assert outcome.excluded_projects == ["B"]
    assert outcome.selected == "C"
    assert outcome.payments == {"op1": 0.0, "op2": 0.0}
    assert outcome.subsidy == pytest.approx(4.0)


def test_round_respects_pre_excluded():
    policies = {"op1": _btr({"A": 10.0, "B": 6.0}), "op2": _btr({"A": 5.0, "B": 2.0})}
    costs = {"A": 3.0, "B": 4.0}
    outcome = run_round(
        policies, costs, {"op1": 100.0, "op2": 100.0}, 100.0, 1.0,
        pre_excluded={"A"},
    )
    assert outcome.selected == "B"


def test_round_is_deterministic():
    policies = {
        "op1": _btr({"A": 30.0, "B": 1.0, "C": 9.0}),
        "op2": _btr({"A": 1.0, "B": 12.0, "C": 1.0}),
    }
    costs = {"A": 25.0, "B": 5.0, "C": 4.0}
    budgets = {"op1": 100.0, "op2": 100.0}
    first = run_round(policies, costs, budgets, 100.0, 0.5)
    second = run_round(policies, costs, budgets, 100.0, 0.5)
    assert first == second


# ---------------------------------------------------------------------------
# randomized properties


@st.composite
def btr_instance(draw):
    n_ops = draw(st.integers(min_value=1, max_value=4))
    n_proj = draw(st.integers(min_value=1, max_value=5))
    projects = [f"X{k}" for k in range(n_proj)]
    benefit = st.floats(min_value=-50.0, max_value=100.0)
    policies = {
        f"op{i}": StrategyPolicy(
            Strategy.BTR,
            {x: draw(benefit) for x in projects},
            available=draw(st.floats(min_value=0.0, max_value=80.0)),
        )
        for i in range(n_ops)
    }
    costs = {x: draw(st.floats(min_value=0.0, max_value=150.0)) for x in projects}
    return policies, costs


@given(btr_instance())
@settings(max_examples=300, deadline=None)
def test_btr_payment_bounds_property(instance):
    policies, costs = instance
    budgets = {op: p.available for op, p in policies.items()}
    outcome = run_round(policies, costs, budgets, math.inf, 1.0)
    if outcome.selected is None:
        assert all(p == 0.0 for p in outcome.payments.values())
        return
    for op, p in outcome.payments.items():
        assert p >= 0.0
        assert p <= outcome.reports[op][outcome.selected] + 1e-9
        assert p <= policies[op].available + 1e-9


@given(btr_instance(), st.sampled_from([0.6, 0.8]))
@settings(max_examples=300, deadline=None)
def test_payments_independent_of_alpha(instance, alpha):
    policies, costs = instance
    budgets = {op: p.available for op, p in policies.items()}
    tight = run_round(policies, costs, budgets, math.inf, alpha)
    loose = run_round(policies, costs, budgets, math.inf, 1.0)
    if tight.selected is not None and tight.selected == loose.selected:
        assert tight.payments == loose.payments
        assert tight.subsidy == loose.subsidy
