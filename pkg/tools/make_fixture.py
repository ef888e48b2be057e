"""Generate the bundled mini-Europe fixture (network, demand, scenario)."""
import math
from pathlib import Path

from netmech.network import (
    CityNode,
    EdgeStatus,
    Mode,
    NetEdge,
    build_network,
    full_car_mesh,
)
from netmech.scenario import gravity_demand, write_demands, write_network

OUT = Path(__file__).resolve().parents[1] / "src" / "netmech" / "data" / "mini_europe"

COORDS = {
    "A1": (0.0, 0.0), "A2": (80.0, 10.0), "A3": (160.0, 20.0),
    "B1": (260.0, 30.0), "B2": (340.0, 0.0), "B3": (410.0, 40.0),
    "C1": (520.0, 30.0), "C2": (590.0, 0.0), "C3": (680.0, 20.0),
}
REGION = {c: f"R{1 + i // 3}" for i, c in enumerate(sorted(COORDS))}
POP = {
    "A1": 2.0e6, "A2": 0.8e6, "A3": 0.6e6,
    "B1": 1.2e6, "B2": 2.5e6, "B3": 0.7e6,
    "C1": 0.9e6, "C2": 2.2e6, "C3": 1.0e6,
}
AIRPORTS = {"A1": 15.0, "B2": 20.0, "C2": 18.0}
# airport-less cities reach the nearest airport; far ones have none at all
AIR_ACCESS_EXTRA = {"A2": 60.0, "B1": 70.0, "B3": 65.0, "C1": 75.0, "C3": 80.0}

# regions R2 and R3 start rail-disconnected; the K_B3_C1 / K_B3_C3
# candidates bridge them, so cross-border cooperation has real value
RAIL_IMPLEMENTED = [
    ("R_A1_A2", "A1", "A2"), ("R_A2_A3", "A2", "A3"),
    ("R_B1_B2", "B1", "B2"), ("R_B2_B3", "B2", "B3"),
    ("R_C1_C2", "C1", "C2"), ("R_C2_C3", "C2", "C3"),
    ("R_C1_C3", "C1", "C3"), ("R_A3_B1", "A3", "B1"),
]
RAIL_CANDIDATES = [
    ("K_A1_B1", "A1", "B1"), ("K_B1_B3", "B1", "B3"),
    ("K_B3_C1", "B3", "C1"), ("K_B3_C3", "B3", "C3"),
]
# explicit synthetic costs (euros), sized against the yearly revenue gains:
# the K_B3_C1 bridge needs joint funding plus the central subsidy
CANDIDATE_COST = {
    "K_A1_B1": 30e6,
    "K_B1_B3": 2.5e6,
    "K_B3_C1": 90e6,
    "K_B3_C3": 40e6,
}
FLIGHTS = [("F_A1_B2", "A1", "B2"), ("F_B2_C2", "B2", "C2"), ("F_A1_C2", "A1", "C2")]

COST_PER_KM = 0.02e6  # synthetic scale, euros per km


def dist(a, b):
    (xa, ya), (xb, yb) = COORDS[a], COORDS[b]
    return math.hypot(xb - xa, yb - ya)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    cities = [
        CityNode(
            id=c,
            region=REGION[c],
            population=POP[c],
            access_distance={
                Mode.RAIL: 3.0,
                Mode.CAR: 2.0,
                Mode.AIR: AIRPORTS.get(c, AIR_ACCESS_EXTRA.get(c, math.inf)),
            },
        )
        for c in sorted(COORDS)
    ]
    edges = []
    for eid, u, v in RAIL_IMPLEMENTED:
        edges.append(
            NetEdge(eid, u, v, Mode.RAIL, EdgeStatus.IMPLEMENTED,
                    length=round(1.05 * dist(u, v), 1), speed=148.0)
        )
    for eid, u, v in RAIL_CANDIDATES:
        length = round(1.05 * dist(u, v), 1)
        edges.append(
            NetEdge(eid, u, v, Mode.RAIL, EdgeStatus.NOT_IMPLEMENTED,
                    length=length, speed=148.0, cost=CANDIDATE_COST[eid])
        )
    for eid, u, v in FLIGHTS:
        edges.append(
            NetEdge(eid, u, v, Mode.AIR, EdgeStatus.IMPLEMENTED,
                    length=round(dist(u, v), 1), speed=880.0)
        )
    edges.extend(full_car_mesh(cities, COORDS))
    net = build_network(cities, edges)
    write_network(net, OUT / "mini_europe.net")

    demands = gravity_demand(POP, COORDS, total_trips=30e6)
    write_demands(demands, OUT / "mini_europe.dem")
    print("wrote", OUT)


if __name__ == "__main__":
    main()
