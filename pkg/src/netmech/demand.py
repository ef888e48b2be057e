"""Travel demand: generalized costs, logit mode split, revenue and welfare.

Revenue attribution follows the shortest rail path: each region earns the
per-km ticket price on the kilometres of the path inside it (cross-border
edges split half/half), times the rail trip volume from the logit split.
A project's benefit to an operator is the revenue difference with and
without the project; social welfare is the sum of those benefits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .network import (
    INF,
    EdgeStatus,
    MobilityNetwork,
    Mode,
    NetEdge,
    NetworkError,
    compute_air_matrix,
    compute_mode_matrices,
)

#: Appendix defaults. The per-km rail price is the published per-hour ticket
#: price divided by the train speed (50.4 / 148); waiting times other than
#: the plane's 1.5 h are unpublished and configurable.
DEFAULT_VOT_IN_VEHICLE = {Mode.RAIL: 29.75, Mode.CAR: 20.35, Mode.AIR: 46.76}
DEFAULT_MODE_SPEED = {Mode.RAIL: 148.0, Mode.CAR: 116.5, Mode.AIR: 880.0}
DEFAULT_WAIT_TIME = {Mode.RAIL: 0.5, Mode.CAR: 0.0, Mode.AIR: 1.5}


class DemandError(ValueError):
    """Invalid demand input or parameterization."""


class UnreachableError(DemandError):
    """All modes have infinite cost for an origin-destination pair."""


@dataclass(frozen=True)
class TripDemand:
    """Annual trip volume between an ordered origin-destination pair."""

    origin: str
    dest: str
    volume: float

    def __post_init__(self):
        if self.origin == self.dest:
            raise DemandError("demand origin and destination must differ")
        if self.volume < 0:
            raise DemandError("demand volume must be >= 0")


@dataclass(frozen=True)
class DemandParams:
    """Value-of-time and mode-choice parameters (euros, hours, km)."""

    vot_in_vehicle: Mapping[Mode, float] = field(
        default_factory=lambda: dict(DEFAULT_VOT_IN_VEHICLE)
    )
    vot_access: float = 17.05
    vot_wait: float = 25.0
    wait_time: Mapping[Mode, float] = field(
        default_factory=lambda: dict(DEFAULT_WAIT_TIME)
    )
    cost_sensitivity: float = 0.0461
    urban_speed: float = 38.0
    mode_speed: Mapping[Mode, float] = field(
        default_factory=lambda: dict(DEFAULT_MODE_SPEED)
    )
    rail_price_per_km: float = 50.4 / 148.0

    def __post_init__(self):
        strictly_positive = {
            "vot_access": self.vot_access,
            "vot_wait": self.vot_wait,
            "cost_sensitivity": self.cost_sensitivity,
            "urban_speed": self.urban_speed,
            "rail_price_per_km": self.rail_price_per_km,
        }
        for name, value in strictly_positive.items():
            if value <= 0:
                raise DemandError(f"{name} must be > 0")
        for mapping in (self.vot_in_vehicle, self.mode_speed):
            for mode, value in mapping.items():
                if value <= 0:
                    raise DemandError(f"value for {mode.value} must be > 0")
        for mode, value in self.wait_time.items():
            if value < 0:
                raise DemandError(f"wait time for {mode.value} must be >= 0")

    def with_overrides(self, overrides: Mapping[str, object]) -> "DemandParams":
        return replace(self, **dict(overrides))


@dataclass(frozen=True)
class ModeSplit:
    """Logit mode shares for one origin-destination pair."""

    share: Mapping[Mode, float]

    def __post_init__(self):
        total = sum(self.share.values())
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise DemandError(f"mode shares sum to {total}, expected 1")
        for mode, s in self.share.items():
            if s < 0 or s > 1:
                raise DemandError(f"share for {mode.value} out of [0, 1]")


def generalized_cost(
    params: DemandParams,
    mode: Mode,
    line_distance: float,
    access_origin: float,
    access_dest: float,
) -> float:
    """Monetized door-to-door cost for one mode given its path distance."""
    if mode not in params.vot_in_vehicle:
        raise DemandError(f"unknown mode: {mode}")
    if not all(map(math.isfinite, (line_distance, access_origin, access_dest))):
        return INF
    return (
        params.vot_access * (access_origin + access_dest) / params.urban_speed
        + params.vot_wait * params.wait_time.get(mode, 0.0)
        + params.vot_in_vehicle[mode] * line_distance / params.mode_speed[mode]
    )


def travel_cost(
    net: MobilityNetwork,
    params: DemandParams,
    mode: Mode,
    origin: str,
    dest: str,
    extra_edges: Iterable[NetEdge] = (),
) -> float:
    """Door-to-door cost between two cities, ``inf`` when unreachable."""
    if mode == Mode.AIR:
        mats = compute_air_matrix(net)
    else:
        mats = compute_mode_matrices(net, mode, extra_edges)
    return generalized_cost(
        params,
        mode,
        mats.distance(origin, dest),
        net.city(origin).access(mode),
        net.city(dest).access(mode),
    )


def mode_split(costs: Mapping[Mode, float], cost_sensitivity: float) -> ModeSplit:
    """Logit shares over modes; infinite-cost modes get exactly zero weight.

    Exponentials are shifted by the minimum finite cost for stability.
    """
    finite = {m: c for m, c in costs.items() if math.isfinite(c)}
    if not finite:
        raise UnreachableError("all modes unreachable for this OD pair")
    shift = min(finite.values())
    weights = {
        m: math.exp(-cost_sensitivity * (c - shift)) for m, c in finite.items()
    }
    total = sum(weights.values())
    share = {m: 0.0 for m in costs}
    for m, w in weights.items():
        share[m] = w / total
    return ModeSplit(share)


class RevenueModel:
    """Vectorized revenue evaluation with caching over rail project sets.

    Car and air distances never change (projects are rail edges), so their
    matrices are computed once. Rail matrices and per-region revenues are
    memoized per frozenset of extra edge ids - the hot loop when valuing
    candidate projects.
    """

    def __init__(
        self,
        net: MobilityNetwork,
        params: DemandParams,
        demands: Sequence[TripDemand],
    ):
        self.net = net
        self.params = params
        self.demands = list(demands)
        self.region_of = net.region_index()
        self._car = compute_mode_matrices(net, Mode.CAR)
        self._air = compute_air_matrix(net, self._car)
        node_of = self._car.node_of
        for d in self.demands:
            if d.origin not in node_of or d.dest not in node_of:
                raise DemandError(
                    f"demand references unknown city: {d.origin}-{d.dest}"
                )
        self._o = np.array([node_of[d.origin] for d in self.demands], dtype=np.int64)
        self._d = np.array([node_of[d.dest] for d in self.demands], dtype=np.int64)
        self._q = np.array([d.volume for d in self.demands])
        order = sorted(node_of, key=node_of.get)
        self._access = {
            m: np.array([net.city(c).access(m) for c in order]) for m in Mode
        }
        self._rev_cache: dict[frozenset[str], np.ndarray] = {}

    def _od_costs(self, mode: Mode, line_dist: np.ndarray) -> np.ndarray:
        p = self.params
        acc = self._access[mode][self._o] + self._access[mode][self._d]
        wait = p.wait_time.get(mode, 0.0)
        with np.errstate(invalid="ignore"):
            cost = (
                p.vot_access * acc / p.urban_speed
                + p.vot_wait * wait
                + p.vot_in_vehicle[mode] * line_dist / p.mode_speed[mode]
            )
        cost[~np.isfinite(acc) | ~np.isfinite(line_dist)] = INF
        return cost

    def region_revenues(self, extra_edges: Iterable[NetEdge] = ()) -> np.ndarray:
        """Annual rail revenue per region (index order: sorted region ids)."""
        extra = {e.id: e for e in extra_edges}
        key = frozenset(extra)
        cached = self._rev_cache.get(key)
        if cached is not None:
            return cached
        rail = compute_mode_matrices(
            self.net, Mode.RAIL, extra.values(), with_regions=True
        )
        rail_dist = rail.dist[self._o, self._d]
        costs = {
            Mode.RAIL: self._od_costs(Mode.RAIL, rail_dist),
            Mode.CAR: self._od_costs(Mode.CAR, self._car.dist[self._o, self._d]),
            Mode.AIR: self._od_costs(Mode.AIR, self._air.dist[self._o, self._d]),
        }
        stacked = np.stack([costs[m] for m in (Mode.RAIL, Mode.CAR, Mode.AIR)])
        finite = np.isfinite(stacked)
        shift = np.min(np.where(finite, stacked, np.inf), axis=0)
        usable = finite & np.isfinite(shift)
        shifted = np.where(usable, stacked - np.where(usable, shift, 0.0), 0.0)
        weights = np.where(
            usable, np.exp(-self.params.cost_sensitivity * shifted), 0.0
        )
        totals = weights.sum(axis=0)
        rail_share = np.divide(
            weights[0], totals, out=np.zeros_like(totals), where=totals > 0
        )
        rail_trips = self._q * rail_share
        # tau_i * d = km of the shortest rail path inside region i
        km_by_region = rail.region_len[self._o, self._d, :]
        km_by_region = np.where(
            np.isfinite(rail_dist)[:, None], km_by_region, 0.0
        )
        revenue = self.params.rail_price_per_km * (
            rail_trips[:, None] * km_by_region
        ).sum(axis=0)
        self._rev_cache[key] = revenue
        return revenue

    def revenue(self, region: str, extra_edges: Iterable[NetEdge] = ()) -> float:
        if region not in self.region_of:
            raise NetworkError(f"unknown region: {region}")
        return float(self.region_revenues(extra_edges)[self.region_of[region]])

    def benefits(self, extra_edges: Iterable[NetEdge]) -> dict[str, float]:
        """Per-region revenue change from adding ``extra_edges``."""
        delta = self.region_revenues(extra_edges) - self.region_revenues()
        return {r: float(delta[i]) for r, i in self.region_of.items()}

    def welfare(self, extra_edges: Iterable[NetEdge]) -> float:
        return float(sum(self.benefits(extra_edges).values()))


def _check_projects(projects: Iterable[NetEdge]):
    for project in projects:
        if project.mode != Mode.RAIL:
            raise DemandError(f"project {project.id} is not a rail edge")
        if project.status == EdgeStatus.IMPLEMENTED:
            raise DemandError(f"project {project.id} is already implemented")


def rail_revenue(
    net: MobilityNetwork,
    params: DemandParams,
    demands: Sequence[TripDemand],
    operator: str,
    extra_edges: Iterable[NetEdge] = (),
) -> float:
    """Annual rail revenue of one operator's region, in euros per year."""
    return RevenueModel(net, params, demands).revenue(operator, extra_edges)


def project_benefit(
    net: MobilityNetwork,
    params: DemandParams,
    demands: Sequence[TripDemand],
    operator: str,
    project: NetEdge,
) -> float:
    """Revenue gain (possibly negative) for an operator from one project."""
    _check_projects([project])
    model = RevenueModel(net, params, demands)
    return model.benefits([project])[operator]


def social_welfare(
    net: MobilityNetwork,
    params: DemandParams,
    demands: Sequence[TripDemand],
    projects: Iterable[NetEdge],
) -> float:
    """Sum of all operators' benefits from a project set, euros per year."""
    projects = list(projects)
    _check_projects(projects)
    return RevenueModel(net, params, demands).welfare(projects)
