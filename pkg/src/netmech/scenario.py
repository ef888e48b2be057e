"""Scenario files: network and demand grammars, config loading, validation.

Formats (versioned in ``docs/formats.md``):

* ``.net`` network file, whitespace-separated records, ``#`` comments::

      city <id> <region> <population> <access_rail_km> <access_air_km> <access_car_km>
      edge <id> <city> <city> <rail|air|car> <status 0|1|2> <remaining_years> <length_km> <speed_kmh> <cost_eur>

  Access distances accept ``inf`` for a missing station.

* ``.dem`` demand file: ``<origin> <dest> <annual_trips>`` per line.

* scenario ``.yaml``: horizon, discount, file references, central
  organization, operators, candidate project list and parameter overrides.

Loading validates every record and reports violations with file/line
context; loaded scenarios round-trip losslessly through the writers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import yaml

from .demand import DemandParams, TripDemand
from .mechanism import Strategy
from .network import (
    CityNode,
    EdgeStatus,
    MobilityNetwork,
    Mode,
    NetEdge,
    NetworkError,
    build_network,
)
from .sim import CentralState, OperatorState, SimState

#: Appendix default, euros per km of new rail construction (15.7 M EUR/km).
DEFAULT_COST_PER_KM = 15.7e6


class ScenarioError(ValueError):
    """Scenario input problem, with file/line context when available."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if self.path is not None:
            where = f"{self.path}:{line}: " if line is not None else f"{self.path}: "
        super().__init__(where + message)


@dataclass
class ScenarioConfig:
    name: str
    horizon: int
    discount: float
    alpha: float
    central_budget: float
    central_increment: float
    operators: list[dict]
    network_path: Path
    demand_path: Path
    candidates: list[object]
    cost_per_km: float = DEFAULT_COST_PER_KM
    construction_years: int = 0
    seed: int = 0
    literal_minmax: bool = False
    param_overrides: dict = field(default_factory=dict)


@dataclass
class Scenario:
    config: ScenarioConfig
    network: MobilityNetwork
    demands: list[TripDemand]
    params: DemandParams
    candidate_ids: list[str]

    def build_state(
        self,
        alpha: float | None = None,
        central_budget: float | None = None,
        strategies: Mapping[str, Strategy] | None = None,
    ) -> SimState:
        """Fresh simulation state; optional per-run overrides for sweeps."""
        cfg = self.config
        operators = {}
        for op in cfg.operators:
            region = op["region"]
            strategy = (strategies or {}).get(
                region, Strategy(op.get("strategy", "btr"))
            )
            operators[region] = OperatorState(
                region=region,
                budget=float(op["budget"]),
                yearly_increment=float(op["increment"]),
                strategy=strategy,
            )
        central = CentralState(
            budget=cfg.central_budget if central_budget is None else central_budget,
            yearly_increment=cfg.central_increment,
            investment_ratio=cfg.alpha if alpha is None else alpha,
        )
        candidates = {
            pid: self.network.edges[pid] for pid in sorted(self.candidate_ids)
        }
        return SimState(
            network=self.network,
            params=self.params,
            demands=list(self.demands),
            candidates=candidates,
            operators=operators,
            central=central,
            discount=cfg.discount,
            horizon=cfg.horizon,
            construction_years=cfg.construction_years,
            literal_minmax=cfg.literal_minmax,
        )


# ---------------------------------------------------------------------------
# network / demand record files


def _parse_float(token: str, what: str, path, line) -> float:
    if token.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(token)
    except ValueError:
        raise ScenarioError(f"bad {what}: {token!r}", path, line) from None


def load_network(path: str | Path) -> MobilityNetwork:
    path = Path(path)
    cities: list[CityNode] = []
    edges: list[NetEdge] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "city":
            if len(tokens) != 7:
                raise ScenarioError(
                    "city record needs: id region population access_rail access_air access_car",
                    path,
                    lineno,
                )
            _, cid, region, pop, a_rail, a_air, a_car = tokens
            try:
                cities.append(
                    CityNode(
                        id=cid,
                        region=region,
                        population=_parse_float(pop, "population", path, lineno),
                        access_distance={
                            Mode.RAIL: _parse_float(a_rail, "rail access", path, lineno),
                            Mode.AIR: _parse_float(a_air, "air access", path, lineno),
                            Mode.CAR: _parse_float(a_car, "car access", path, lineno),
                        },
                    )
                )
            except NetworkError as exc:
                raise ScenarioError(str(exc), path, lineno) from None
        elif kind == "edge":
            if len(tokens) != 10:
                raise ScenarioError(
                    "edge record needs: id u v mode status remaining length speed cost",
                    path,
                    lineno,
                )
            _, eid, u, v, mode, status, remaining, length, speed, cost = tokens
            try:
                edges.append(
                    NetEdge(
                        id=eid,
                        u=u,
                        v=v,
                        mode=Mode(mode),
                        status=EdgeStatus(int(status)),
                        construction_remaining=int(remaining),
                        length=_parse_float(length, "length", path, lineno),
                        speed=_parse_float(speed, "speed", path, lineno),
                        cost=_parse_float(cost, "cost", path, lineno),
                    )
                )
            except (ValueError, NetworkError) as exc:
                raise ScenarioError(str(exc), path, lineno) from None
        else:
            raise ScenarioError(f"unknown record kind: {kind!r}", path, lineno)
    try:
        return build_network(cities, edges)
    except NetworkError as exc:
        raise ScenarioError(str(exc), path) from None


def write_network(net: MobilityNetwork, path: str | Path):
    lines = ["# city <id> <region> <population> <access_rail> <access_air> <access_car>"]
    for cid in sorted(net.cities):
        c = net.cities[cid]
        acc = [c.access(m) for m in (Mode.RAIL, Mode.AIR, Mode.CAR)]
        acc_s = " ".join("inf" if math.isinf(a) else repr(a) for a in acc)
        lines.append(f"city {c.id} {c.region} {c.population!r} {acc_s}")
    lines.append("# edge <id> <u> <v> <mode> <status> <remaining> <length> <speed> <cost>")
    for eid in sorted(net.edges):
        e = net.edges[eid]
        lines.append(
            f"edge {e.id} {e.u} {e.v} {e.mode.value} {int(e.status)} "
            f"{e.construction_remaining} {e.length!r} {e.speed!r} {e.cost!r}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def load_demands(path: str | Path, net: MobilityNetwork | None = None) -> list[TripDemand]:
    path = Path(path)
    out: list[TripDemand] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise ScenarioError("demand record needs: origin dest volume", path, lineno)
        origin, dest, volume = tokens
        if net is not None:
            for cid in (origin, dest):
                if cid not in net.cities:
                    raise ScenarioError(f"unknown city id: {cid}", path, lineno)
        try:
            out.append(
                TripDemand(origin, dest, _parse_float(volume, "volume", path, lineno))
            )
        except ValueError as exc:
            raise ScenarioError(str(exc), path, lineno) from None
    return out


def write_demands(demands: Sequence[TripDemand], path: str | Path):
    lines = ["# <origin> <dest> <annual_trips>"]
    for d in sorted(demands, key=lambda d: (d.origin, d.dest)):
        lines.append(f"{d.origin} {d.dest} {d.volume!r}")
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# scenario config


def _require(mapping: Mapping, key: str, path) -> object:
    if key not in mapping:
        raise ScenarioError(f"missing required field: {key}", path)
    return mapping[key]


def load_scenario(path: str | Path) -> Scenario:
    """Load and fully validate a scenario: config, network, demand.

    Raises :class:`ScenarioError` with location context for parse errors,
    invariant violations and dangling references.
    """
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError(f"not valid YAML: {exc}", path) from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario file must be a mapping", path)

    central = _require(doc, "central", path)
    alpha = float(_require(central, "alpha", path))
    if not 0.0 <= alpha <= 1.0:
        raise ScenarioError(f"alpha must lie in [0, 1], got {alpha}", path)
    horizon = int(_require(doc, "horizon", path))
    if horizon < 1:
        raise ScenarioError(f"horizon must be >= 1, got {horizon}", path)
    operators = _require(doc, "operators", path)
    if not operators:
        raise ScenarioError("at least one operator is required", path)
    for op in operators:
        for key in ("region", "budget", "increment"):
            if key not in op:
                raise ScenarioError(f"operator missing field: {key}", path)
        if float(op["budget"]) < 0 or float(op["increment"]) < 0:
            raise ScenarioError(
                f"operator {op['region']}: budgets must be >= 0", path
            )
        if "strategy" in op:
            try:
                Strategy(op["strategy"])
            except ValueError:
                raise ScenarioError(
                    f"operator {op['region']}: unknown strategy {op['strategy']!r}",
                    path,
                ) from None
    if float(_require(central, "budget", path)) < 0:
        raise ScenarioError("central budget must be >= 0", path)

    cfg = ScenarioConfig(
        name=str(doc.get("name", path.stem)),
        horizon=horizon,
        discount=float(doc.get("discount", 0.976)),
        alpha=alpha,
        central_budget=float(central["budget"]),
        central_increment=float(central.get("increment", 0.0)),
        operators=list(operators),
        network_path=path.parent / _require(doc, "network", path),
        demand_path=path.parent / _require(doc, "demand", path),
        candidates=list(doc.get("candidates", [])),
        cost_per_km=float(doc.get("cost_per_km", DEFAULT_COST_PER_KM)),
        construction_years=int(doc.get("construction_years", 0)),
        seed=int(doc.get("seed", 0)),
        literal_minmax=bool(doc.get("literal_minmax", False)),
        param_overrides=dict(doc.get("params", {})),
    )
    if not cfg.network_path.exists():
        raise ScenarioError(f"network file not found: {cfg.network_path}", path)
    if not cfg.demand_path.exists():
        raise ScenarioError(f"demand file not found: {cfg.demand_path}", path)

    network = load_network(cfg.network_path)
    demands = load_demands(cfg.demand_path, network)
    params = _build_params(cfg.param_overrides, path)

    declared_regions = {op["region"] for op in cfg.operators}
    if declared_regions != set(network.regions):
        raise ScenarioError(
            f"operator regions {sorted(declared_regions)} do not match "
            f"network regions {sorted(network.regions)}",
            path,
        )

    candidate_ids: list[str] = []
    for item in cfg.candidates:
        if isinstance(item, str):
            if item not in network.edges:
                raise ScenarioError(f"candidate references unknown edge: {item}", path)
            edge = network.edges[item]
        else:
            for key in ("id", "from", "to", "length"):
                if key not in item:
                    raise ScenarioError(f"inline candidate missing field: {key}", path)
            edge = NetEdge(
                id=str(item["id"]),
                u=str(item["from"]),
                v=str(item["to"]),
                mode=Mode.RAIL,
                status=EdgeStatus.NOT_IMPLEMENTED,
                length=float(item["length"]),
                speed=float(item.get("speed", 148.0)),
                cost=float(item["length"]) * cfg.cost_per_km,
            )
            if edge.id in network.edges:
                raise ScenarioError(f"duplicate candidate edge id: {edge.id}", path)
            for end in edge.endpoints:
                if end not in network.cities:
                    raise ScenarioError(
                        f"inline candidate {edge.id} references unknown city: {end}",
                        path,
                    )
            network = MobilityNetwork(
                network.cities, {**network.edges, edge.id: edge}, network.regions
            )
        if edge.mode != Mode.RAIL:
            raise ScenarioError(f"candidate {edge.id} is not a rail edge", path)
        if edge.status != EdgeStatus.NOT_IMPLEMENTED:
            raise ScenarioError(f"candidate {edge.id} is already implemented", path)
        candidate_ids.append(edge.id)
    if len(set(candidate_ids)) != len(candidate_ids):
        raise ScenarioError("duplicate candidate ids", path)

    return Scenario(cfg, network, demands, params, candidate_ids)


def _build_params(overrides: Mapping[str, object], path) -> DemandParams:
    per_mode = {"vot_in_vehicle", "wait_time", "mode_speed"}
    kwargs = {}
    for key, value in overrides.items():
        if key in per_mode:
            base = dict(getattr(DemandParams(), key))
            for mode_name, v in value.items():
                base[Mode(mode_name)] = float(v)
            kwargs[key] = base
        else:
            kwargs[key] = float(value)
    try:
        return DemandParams(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad parameter override: {exc}", path) from None


def gravity_demand(
    populations: Mapping[str, float],
    coords: Mapping[str, tuple[float, float]],
    total_trips: float,
) -> list[TripDemand]:
    """Optional gravity generator: volumes ~ s_i s_j / dist^2, scaled so the
    yearly total matches ``total_trips``. Planar coordinates in km."""
    pairs = []
    for i in sorted(populations):
        for j in sorted(populations):
            if i >= j:
                continue
            (xi, yi), (xj, yj) = coords[i], coords[j]
            d2 = (xi - xj) ** 2 + (yi - yj) ** 2
            pairs.append((i, j, populations[i] * populations[j] / d2))
    raw_total = sum(w for _, _, w in pairs)
    kappa = total_trips / raw_total
    return [TripDemand(i, j, round(kappa * w, 1)) for i, j, w in pairs]
