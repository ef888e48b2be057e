import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netmech.demand import (
    DemandError,
    DemandParams,
    ModeSplit,
    RevenueModel,
    TripDemand,
    UnreachableError,
    generalized_cost,
    mode_split,
    project_benefit,
    rail_revenue,
    social_welfare,
    travel_cost,
)
from netmech.network import EdgeStatus, Mode, build_network, rail_region_share

from conftest import car, city, no_air, rail

PARAMS = DemandParams()


# ---------------------------------------------------------------------------
# input validation


def test_trip_demand_validation():
    with pytest.raises(DemandError):
        TripDemand("A", "A", 10.0)
    with pytest.raises(DemandError):
        TripDemand("A", "B", -1.0)


def test_params_validation():
    with pytest.raises(DemandError):
        DemandParams(cost_sensitivity=0.0)
    with pytest.raises(DemandError):
        DemandParams(vot_in_vehicle={Mode.RAIL: -1.0})
    with pytest.raises(DemandError):
        DemandParams(wait_time={Mode.RAIL: -0.1})
    # zero wait times are fine
    DemandParams(wait_time={Mode.RAIL: 0.0})


def test_mode_split_shares_must_sum_to_one():
    with pytest.raises(DemandError):
        ModeSplit({Mode.RAIL: 0.7, Mode.CAR: 0.7})


# ---------------------------------------------------------------------------
# generalized cost


def test_plane_cost_worked_example():
    # access 20 + egress 30 km at 38 km/h, 1.5 h wait, 880 km at 880 km/h
    cost = generalized_cost(PARAMS, Mode.AIR, 880.0, 20.0, 30.0)
    assert cost == pytest.approx(106.694, abs=1e-3)


def test_cost_single_term_reduction():
    params = PARAMS.with_overrides({"wait_time": {m: 0.0 for m in Mode}})
    cost = generalized_cost(params, Mode.RAIL, 296.0, 0.0, 0.0)
    assert cost == pytest.approx(29.75 * 296.0 / 148.0)


def test_infinite_distance_propagates():
    assert generalized_cost(PARAMS, Mode.RAIL, math.inf, 0.0, 0.0) == math.inf
    assert generalized_cost(PARAMS, Mode.AIR, 100.0, math.inf, 0.0) == math.inf


def test_travel_cost_uses_network_distance(triangle):
    got = travel_cost(triangle, PARAMS, Mode.RAIL, "A", "C")
    expect = generalized_cost(PARAMS, Mode.RAIL, 200.0, 0.0, 0.0)
    assert got == pytest.approx(expect)


# ---------------------------------------------------------------------------
# logit split


def test_equal_costs_split_evenly():
    split = mode_split({m: 40.0 for m in Mode}, PARAMS.cost_sensitivity)
    for m in Mode:
        assert split.share[m] == pytest.approx(1 / 3)


def test_unreachable_mode_gets_exact_zero():
    split = mode_split(
        {Mode.RAIL: 40.0, Mode.CAR: 40.0, Mode.AIR: math.inf},
        PARAMS.cost_sensitivity,
    )
    assert split.share[Mode.AIR] == 0.0
    assert split.share[Mode.RAIL] == pytest.approx(0.5)


def test_two_mode_closed_form():
    split = mode_split(
        {Mode.RAIL: 50.0, Mode.CAR: 100.0, Mode.AIR: math.inf}, 0.0461
    )
    expect = 1.0 / (1.0 + math.exp(-0.0461 * 50.0))
    assert split.share[Mode.RAIL] == pytest.approx(expect, abs=1e-6)
    assert split.share[Mode.CAR] == pytest.approx(1.0 - expect, abs=1e-6)


def test_all_unreachable_raises():
    with pytest.raises(UnreachableError):
        mode_split({m: math.inf for m in Mode}, 0.05)


@given(
    st.lists(
        st.one_of(
            st.floats(min_value=0.0, max_value=500.0),
            st.just(math.inf),
        ),
        min_size=1,
        max_size=3,
    )
)
@settings(max_examples=200, deadline=None)
def test_split_sums_to_one(costs):
    if all(math.isinf(c) for c in costs):
        return
    modes = list(Mode)[: len(costs)]
    split = mode_split(dict(zip(modes, costs)), 0.0461)
    assert sum(split.share.values()) == pytest.approx(1.0, abs=1e-9)
    assert all(0.0 <= s <= 1.0 for s in split.share.values())


@given(
    st.floats(min_value=1.0, max_value=400.0),
    st.floats(min_value=1.0, max_value=400.0),
    st.floats(min_value=0.1, max_value=100.0),
)
@settings(max_examples=200, deadline=None)
def test_split_monotone_in_own_cost(c_rail, c_car, drop):
    before = mode_split({Mode.RAIL: c_rail, Mode.CAR: c_car}, 0.0461)
    after = mode_split({Mode.RAIL: c_rail - drop, Mode.CAR: c_car}, 0.0461)
    assert after.share[Mode.RAIL] >= before.share[Mode.RAIL] - 1e-12
    assert after.share[Mode.CAR] <= before.share[Mode.CAR] + 1e-12


# ---------------------------------------------------------------------------
# revenue


def _flat_params():
    """Rail and car equally attractive so the logit split is exactly 1/2."""
    return DemandParams(
        vot_in_vehicle={Mode.RAIL: 10.0, Mode.CAR: 10.0, Mode.AIR: 46.76},
        mode_speed={Mode.RAIL: 100.0, Mode.CAR: 100.0, Mode.AIR: 880.0},
        wait_time={Mode.RAIL: 0.0, Mode.CAR: 0.0, Mode.AIR: 1.5},
        rail_price_per_km=0.34054,
    )


def test_no_rail_edges_no_revenue():
    net = build_network(
        [city("A", access=no_air()), city("B", access=no_air())],
        [car("CAR_A_B", "A", "B", 200.0)],
    )
    demands = [TripDemand("A", "B", 1000.0)]
    assert rail_revenue(net, _flat_params(), demands, "R1") == 0.0


def test_revenue_worked_example():
    # 1000 trips/yr, rail share 0.5, 200 km all in R1, 0.34054 EUR/km
    net = build_network(
        [city("A", access=no_air()), city("B", access=no_air())],
        [rail("AB", "A", "B", 200.0), car("CAR_A_B", "A", "B", 200.0)],
    )
    demands = [TripDemand("A", "B", 1000.0)]
    assert rail_revenue(net, _flat_params(), demands, "R1") == pytest.approx(34054.0)


def test_revenue_other_region_zero():
    net = build_network(
        [city("A", access=no_air()), city("B", access=no_air()),
         city("Z", "R2", access=no_air())],
        [rail("AB", "A", "B", 200.0), car("CAR_A_B", "A", "B", 200.0)],
    )
    demands = [TripDemand("A", "B", 1000.0)]
    assert rail_revenue(net, _flat_params(), demands, "R2") == 0.0


def _two_region_net():
    cities = [
        city("A", "R1", access=no_air()),
        city("B", "R1", access=no_air()),
        city("C", "R2", access=no_air()),
    ]
    edges = [
        rail("AB", "A", "B", 100.0),
        rail("BC", "B", "C", 100.0),
        rail("AC", "A", "C", 120.0, status=EdgeStatus.NOT_IMPLEMENTED, cost=1.0),
        car("CAR_A_B", "A", "B", 120.0),
        car("CAR_A_C", "A", "C", 150.0),
        car("CAR_B_C", "B", "C", 120.0),
    ]
    return build_network(cities, edges)


def test_project_with_no_path_effect_is_zero():
    net = _two_region_net()
    lonely = [city("X", "R1", access=no_air()), city("Y", "R1", access=no_air())]
    iso = build_network(
        list(net.cities.values()) + lonely,
        list(net.edges.values()),
    )
    project = rail("XY", "X", "Y", 10.0, status=EdgeStatus.NOT_IMPLEMENTED)
    demands = [TripDemand("A", "C", 1000.0)]
    assert project_benefit(iso, PARAMS, demands, "R1", project) == 0.0


def test_project_benefit_can_be_negative():
    # the direct A-C edge shortens the path, moving km out of region 1
    net = _two_region_net()
    demands = [TripDemand("A", "C", 1000.0)]
    project = net.edges["AC"]
    b1 = project_benefit(net, PARAMS, demands, "R1", project)
    b2 = project_benefit(net, PARAMS, demands, "R2", project)
    assert b1 < 0
    assert b2 > 0


def test_implemented_project_rejected():
    net = _two_region_net()
    with pytest.raises(DemandError):
        project_benefit(net, PARAMS, [], "R1", net.edges["AB"])


def test_non_rail_project_rejected():
    net = _two_region_net()
    with pytest.raises(DemandError):
        social_welfare(net, PARAMS, [], [net.edges["CAR_A_B"]])


def test_welfare_empty_set_is_zero():
    net = _two_region_net()
    demands = [TripDemand("A", "C", 1000.0)]
    assert social_welfare(net, PARAMS, demands, []) == 0.0


def test_welfare_equals_sum_of_benefits():
    net = _two_region_net()
    demands = [TripDemand("A", "C", 1000.0), TripDemand("A", "B", 500.0)]
    project = net.edges["AC"]
    total = social_welfare(net, PARAMS, demands, [project])
    split = sum(
        project_benefit(net, PARAMS, demands, r, project) for r in ("R1", "R2")
    )
    assert total == pytest.approx(split, rel=1e-9, abs=1e-9)


def test_region_revenues_additive_over_regions():
    # sum of per-region revenues equals system revenue with full attribution
    net = _two_region_net()
    demands = [TripDemand("A", "C", 1000.0), TripDemand("B", "C", 700.0)]
    model = RevenueModel(net, PARAMS, demands)
    per_region = model.region_revenues()
    system = 0.0
    for d in demands:
        rail_cost = travel_cost(net, PARAMS, Mode.RAIL, d.origin, d.dest)
        car_cost = travel_cost(net, PARAMS, Mode.CAR, d.origin, d.dest)
        air_cost = travel_cost(net, PARAMS, Mode.AIR, d.origin, d.dest)
        split = mode_split(
            {Mode.RAIL: rail_cost, Mode.CAR: car_cost, Mode.AIR: air_cost},
            PARAMS.cost_sensitivity,
        )
        from netmech.network import shortest_mode_distance

        dist = shortest_mode_distance(net, Mode.RAIL, d.origin, d.dest)
        system += PARAMS.rail_price_per_km * dist * d.volume * split.share[Mode.RAIL]
    assert per_region.sum() == pytest.approx(system, rel=1e-9)


def test_region_revenue_matches_share_oracle():
    net = _two_region_net()
    demands = [TripDemand("A", "C", 1000.0)]
    model = RevenueModel(net, PARAMS, demands)
    share = rail_region_share(net, "A", "C", "R1")
    total = model.region_revenues().sum()
    assert model.revenue("R1") == pytest.approx(share * total, rel=1e-9)


def test_revenue_model_cache_is_stable():
    net = _two_region_net()
    demands = [TripDemand("A", "C", 1000.0)]
    model = RevenueModel(net, PARAMS, demands)
    project = net.edges["AC"]
    first = model.benefits([project])
    second = model.benefits([project])
    assert first == second
    fresh = RevenueModel(net, PARAMS, demands).benefits([project])
    assert first == pytest.approx(fresh)


def test_unknown_demand_city_rejected():
    net = _two_region_net()
    with pytest.raises(DemandError):
        RevenueModel(net, PARAMS, [TripDemand("A", "Z", 10.0)])
