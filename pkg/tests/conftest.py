"""Shared builders for small hand-checkable networks."""
import math

import pytest

from netmech.network import (
    CityNode,
    EdgeStatus,
    Mode,
    NetEdge,
    build_network,
)

ALL_ACCESS = {Mode.RAIL: 0.0, Mode.AIR: 0.0, Mode.CAR: 0.0}


def city(cid, region="R1", pop=1e6, access=None):
    return CityNode(
        id=cid,
        region=region,
        population=pop,
        access_distance=dict(access if access is not None else ALL_ACCESS),
    )


def rail(eid, u, v, length, status=EdgeStatus.IMPLEMENTED, cost=0.0, remaining=0):
    return NetEdge(
        eid, u, v, Mode.RAIL,
        status=status, construction_remaining=remaining,
        length=length, speed=148.0, cost=cost,
    )


def car(eid, u, v, length):
    return NetEdge(eid, u, v, Mode.CAR, length=length, speed=116.5)


def flight(eid, u, v, length):
    return NetEdge(eid, u, v, Mode.AIR, length=length, speed=880.0)


@pytest.fixture
def triangle():
    """A-B-C triangle: AB=100, BC=100 implemented; AC=150 not implemented."""
    cities = [city("A"), city("B"), city("C")]
    edges = [
        rail("AB", "A", "B", 100.0),
        rail("BC", "B", "C", 100.0),
        rail("AC", "A", "C", 150.0, status=EdgeStatus.NOT_IMPLEMENTED, cost=10.0),
    ]
    return build_network(cities, edges)


@pytest.fixture
def two_region_line():
    """A-B in R1, C in R2; AB intra-R1 100 km, BC cross-border 60 km."""
    cities = [city("A", "R1"), city("B", "R1"), city("C", "R2")]
    edges = [rail("AB", "A", "B", 100.0), rail("BC", "B", "C", 60.0)]
    return build_network(cities, edges)


def no_air(dist_rail=0.0, dist_car=0.0):
    return {Mode.RAIL: dist_rail, Mode.CAR: dist_car, Mode.AIR: math.inf}
