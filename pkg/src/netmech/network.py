"""Multi-modal, multi-regional mobility network and distance queries.

Cities carry a region, per-mode access distances and a population; edges
carry a mode, an implementation status, a length, a speed and a cost.
Rail distances and per-region rail path lengths are computed by the CSR
kernels in :mod:`netmech._kernels`; air paths are restricted to a direct
flight, optionally preceded by a car drive to the departure airport city.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from typing import Iterable, Mapping

import numpy as np

from . import _kernels

INF = math.inf


class Mode(str, Enum):
    RAIL = "rail"
    AIR = "air"
    CAR = "car"


class EdgeStatus(IntEnum):
    NOT_IMPLEMENTED = 0
    IMPLEMENTED = 1
    UNDER_CONSTRUCTION = 2


class NetworkError(ValueError):
    """Invalid network input (unknown ids, malformed labels)."""


class NoPathError(NetworkError):
    """Raised when an operation requires a finite path and none exists."""


@dataclass(frozen=True)
class CityNode:
    """A city vertex: region membership, mode access distances, population.

    ``access_distance`` maps each mode to the km between the city center and
    the nearest station of that mode; ``math.inf`` marks a missing station.
    """

    id: str
    region: str
    access_distance: Mapping[Mode, float]
    population: float

    def __post_init__(self):
        if self.population <= 0:
            raise NetworkError(f"city {self.id}: population must be > 0")
        for mode, dist in self.access_distance.items():
            if dist < 0:
                raise NetworkError(
                    f"city {self.id}: negative access distance for {mode.value}"
                )

    def access(self, mode: Mode) -> float:
        return self.access_distance.get(mode, INF)


@dataclass(frozen=True)
class NetEdge:
    """An undirected labeled edge between two distinct cities."""

    id: str
    u: str
    v: str
    mode: Mode
    status: EdgeStatus = EdgeStatus.IMPLEMENTED
    construction_remaining: int = 0
    length: float = 1.0
    speed: float = 1.0
    cost: float = 0.0

    def __post_init__(self):
        if self.u == self.v:
            raise NetworkError(f"edge {self.id}: endpoints must be distinct")
        if self.length <= 0 or self.speed <= 0:
            raise NetworkError(f"edge {self.id}: length and speed must be > 0")
        if self.cost < 0:
            raise NetworkError(f"edge {self.id}: cost must be >= 0")
        if self.construction_remaining < 0:
            raise NetworkError(f"edge {self.id}: negative construction countdown")
        if (
            self.status == EdgeStatus.IMPLEMENTED
            and self.construction_remaining != 0
        ):
            raise NetworkError(
                f"edge {self.id}: implemented edge with remaining construction time"
            )

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.u, self.v)

    def other(self, city: str) -> str:
        return self.v if city == self.u else self.u


@dataclass
class MobilityNetwork:
    """A labeled undirected graph of cities and per-mode edge sets.

    Treated as immutable between mechanism rounds; state changes go through
    :func:`advance_construction` / :meth:`with_edge_status`, which return new
    networks.
    """

    cities: dict[str, CityNode]
    edges: dict[str, NetEdge]
    regions: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.regions:
            self.regions = frozenset(c.region for c in self.cities.values())
        for city in self.cities.values():
            if city.region not in self.regions:
                raise NetworkError(f"city {city.id}: unknown region {city.region}")
        for edge in self.edges.values():
            for end in edge.endpoints:
                if end not in self.cities:
                    raise NetworkError(f"edge {edge.id}: unknown city {end}")

    # -- basic accessors -------------------------------------------------

    def city(self, city_id: str) -> CityNode:
        try:
            return self.cities[city_id]
        except KeyError:
            raise NetworkError(f"unknown city id: {city_id}") from None

    def edges_of_mode(self, mode: Mode) -> list[NetEdge]:
        return [e for e in self.edges.values() if e.mode == mode]

    def rail_edges(self) -> list[NetEdge]:
        return self.edges_of_mode(Mode.RAIL)

    def is_cross_border(self, edge: NetEdge) -> bool:
        return self.city(edge.u).region != self.city(edge.v).region

    def edge_regions(self, edge: NetEdge) -> tuple[str, str]:
        return (self.city(edge.u).region, self.city(edge.v).region)

    def with_edge_status(
        self, edge_id: str, status: EdgeStatus, remaining: int = 0
    ) -> "MobilityNetwork":
        edge = self.edges[edge_id]
        new_edge = replace(edge, status=status, construction_remaining=remaining)
        edges = dict(self.edges)
        edges[edge_id] = new_edge
        return MobilityNetwork(self.cities, edges, self.regions)

    # -- compiled views ---------------------------------------------------

    def node_index(self) -> dict[str, int]:
        return {cid: i for i, cid in enumerate(sorted(self.cities))}

    def region_index(self) -> dict[str, int]:
        return {r: i for i, r in enumerate(sorted(self.regions))}

    def traversable(self, mode: Mode, extra: Iterable[NetEdge] = ()) -> list[NetEdge]:
        """Edges usable for travel: implemented edges of the mode plus extras."""
        usable = [
            e
            for e in self.edges.values()
            if e.mode == mode and e.status == EdgeStatus.IMPLEMENTED
        ]
        usable.extend(e for e in extra if e.mode == mode)
        return usable


@dataclass(frozen=True)
class PathMatrices:
    """All-pairs distances (km) plus per-region path lengths for one mode."""

    node_of: dict[str, int]
    region_of: dict[str, int]
    dist: np.ndarray  # (n, n)
    region_len: np.ndarray | None = None  # (n, n, R), rail only

    def distance(self, origin: str, dest: str) -> float:
        return float(self.dist[self.node_of[origin], self.node_of[dest]])


def _csr_arrays(net: MobilityNetwork, edges: list[NetEdge]):
    node_of = net.node_index()
    n = len(node_of)
    # Dense edge table indexed by a local integer id in sorted-id order, so
    # the kernel tie-break "smallest edge id" means lexicographic edge id.
    edges = sorted(edges, key=lambda e: e.id)
    deg = np.zeros(n + 1, dtype=np.int64)
    for e in edges:
        deg[node_of[e.u] + 1] += 1
        deg[node_of[e.v] + 1] += 1
    indptr = np.cumsum(deg)
    nbr = np.zeros(indptr[-1], dtype=np.int64)
    wt = np.zeros(indptr[-1])
    eid = np.zeros(indptr[-1], dtype=np.int64)
    fill = indptr[:-1].copy()
    for k, e in enumerate(edges):
        ui, vi = node_of[e.u], node_of[e.v]
        for a, b in ((ui, vi), (vi, ui)):
            nbr[fill[a]] = b
            wt[fill[a]] = e.length
            eid[fill[a]] = k
            fill[a] += 1
    return node_of, edges, indptr, nbr, wt, eid


def compute_mode_matrices(
    net: MobilityNetwork,
    mode: Mode,
    extra_edges: Iterable[NetEdge] = (),
    with_regions: bool = False,
) -> PathMatrices:
    """All-pairs shortest distances over traversable edges of one mode.

    Air is not handled here (its path set is not a plain shortest path);
    see :func:`air_distalong` / :func:`compute_air_matrix`.
    """
    usable = net.traversable(mode, extra_edges)
    node_of, edges, indptr, nbr, wt, eid = _csr_arrays(net, usable)
    n = len(node_of)
    dist, pred = _kernels.dijkstra_all(indptr, nbr, wt, eid, n)
    region_of = net.region_index()
    region_len = None
    if with_regions:
        if edges:
            e_from = np.array([node_of[e.u] for e in edges], dtype=np.int64)
            e_other = np.array([node_of[e.v] for e in edges], dtype=np.int64)
            e_len = np.array([e.length for e in edges])
            e_ra = np.array(
                [region_of[net.city(e.u).region] for e in edges], dtype=np.int64
            )
            e_rb = np.array(
                [region_of[net.city(e.v).region] for e in edges], dtype=np.int64
            )
            region_len = _kernels.region_lengths(
                pred, dist, e_other, e_from, e_len, e_ra, e_rb, len(region_of)
            )
        else:
            region_len = np.zeros((n, n, len(region_of)))
    return PathMatrices(node_of, region_of, dist, region_len)


def compute_air_matrix(
    net: MobilityNetwork, car: PathMatrices | None = None
) -> PathMatrices:
    """Air distances: a direct flight, or a car drive plus one flight leg.

    The car leg runs on the implemented car network to the departure airport
    city; no drive after the flight (egress is priced via access distances).
    """
    if car is None:
        car = compute_mode_matrices(net, Mode.CAR)
    node_of = car.node_of
    n = len(node_of)
    dist = np.full((n, n), INF)
    flights = net.traversable(Mode.AIR)
    for f in sorted(flights, key=lambda e: e.id):
        a, b = node_of[f.u], node_of[f.v]
        for dep, arr in ((a, b), (b, a)):
            # direct flight
            dist[dep, arr] = min(dist[dep, arr], f.length)
            # car drive to the departure airport, then this flight
            cand = car.dist[:, dep] + f.length
            np.minimum(dist[:, arr], cand, out=dist[:, arr])
    np.fill_diagonal(dist, 0.0)
    return PathMatrices(node_of, car.region_of, dist)


def shortest_mode_distance(
    net: MobilityNetwork,
    mode: Mode,
    origin: str,
    dest: str,
    extra_edges: Iterable[NetEdge] = (),
) -> float:
    """Minimum total length between two cities for a mode, or ``inf``.

    Only implemented edges (plus ``extra_edges``, used to evaluate
    hypothetical rail projects) are traversable.
    """
    if origin == dest:
        raise NetworkError("origin and destination must differ")
    net.city(origin), net.city(dest)
    if mode == Mode.AIR:
        mats = compute_air_matrix(net)
    else:
        mats = compute_mode_matrices(net, mode, extra_edges)
    return mats.distance(origin, dest)


def rail_region_share(
    net: MobilityNetwork,
    origin: str,
    dest: str,
    region: str,
    extra_edges: Iterable[NetEdge] = (),
) -> float:
    """Fraction of the shortest rail path's length lying in ``region``.

    Cross-border edges contribute half their length to each endpoint region,
    so the shares over all regions sum to 1.
    """
    mats = compute_mode_matrices(net, Mode.RAIL, extra_edges, with_regions=True)
    o, d = mats.node_of[origin], mats.node_of[dest]
    total = mats.dist[o, d]
    if not math.isfinite(total):
        raise NoPathError(f"no rail path between {origin} and {dest}")
    if region not in mats.region_of:
        raise NetworkError(f"unknown region: {region}")
    return float(mats.region_len[o, d, mats.region_of[region]] / total)


def advance_construction(net: MobilityNetwork) -> MobilityNetwork:
    """Tick every under-construction edge down one year.

    Edges reaching zero remaining years become implemented; everything else
    is unchanged.
    """
    edges = {}
    for eid, e in net.edges.items():
        if e.status == EdgeStatus.UNDER_CONSTRUCTION:
            remaining = e.construction_remaining - 1
            if remaining <= 0:
                e = replace(
                    e, status=EdgeStatus.IMPLEMENTED, construction_remaining=0
                )
            else:
                e = replace(e, construction_remaining=remaining)
        edges[eid] = e
    return MobilityNetwork(net.cities, edges, net.regions)


def enumerate_path_lengths(
    net: MobilityNetwork,
    mode: Mode,
    origin: str,
    dest: str,
    extra_edges: Iterable[NetEdge] = (),
) -> list[float]:
    """All simple-path lengths between two cities (small graphs only).

    Exhaustive reference used by tests as an independent oracle for
    :func:`shortest_mode_distance` on graphs with few nodes.
    """
    usable = net.traversable(mode, extra_edges)
    adj: dict[str, list[NetEdge]] = {}
    for e in usable:
        adj.setdefault(e.u, []).append(e)
        adj.setdefault(e.v, []).append(e)
    lengths: list[float] = []

    def walk(city: str, seen: set[str], acc: float):
        if city == dest:
            lengths.append(acc)
            return
        for e in adj.get(city, ()):
            nxt = e.other(city)
            if nxt not in seen:
                walk(nxt, seen | {nxt}, acc + e.length)

    walk(origin, {origin}, 0.0)
    return lengths


def build_network(
    cities: Iterable[CityNode], edges: Iterable[NetEdge]
) -> MobilityNetwork:
    city_map: dict[str, CityNode] = {}
    for c in cities:
        if c.id in city_map:
            raise NetworkError(f"duplicate city id: {c.id}")
        city_map[c.id] = c
    edge_map: dict[str, NetEdge] = {}
    for e in edges:
        if e.id in edge_map:
            raise NetworkError(f"duplicate edge id: {e.id}")
        edge_map[e.id] = e
    return MobilityNetwork(city_map, edge_map)


def full_car_mesh(
    cities: Iterable[CityNode],
    coords: Mapping[str, tuple[float, float]],
    detour: float = 1.2,
    speed: float = 116.5,
) -> list[NetEdge]:
    """Car edges between every city pair, lengths from straight-line x detour."""
    out = []
    for a, b in itertools.combinations(sorted(c.id for c in cities), 2):
        (xa, ya), (xb, yb) = coords[a], coords[b]
        length = detour * math.hypot(xb - xa, yb - ya)
        out.append(
            NetEdge(f"CAR_{a}_{b}", a, b, Mode.CAR, length=round(length, 1), speed=speed)
        )
    return out
