"""Multi-regional transport network design with a subsidized VCG mechanism."""

from .network import (
    CityNode,
    EdgeStatus,
    MobilityNetwork,
    Mode,
    NetEdge,
    advance_construction,
    rail_region_share,
    shortest_mode_distance,
)
from .demand import (
    DemandParams,
    ModeSplit,
    TripDemand,
    mode_split,
    project_benefit,
    rail_revenue,
    social_welfare,
    travel_cost,
)
from .mechanism import (
    RoundOutcome,
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
from .sim import (
    CentralState,
    MetricsReport,
    OperatorState,
    SimState,
    compute_metrics,
    local_design,
    run_baseline_ld,
    run_ivcg,
    run_year_ivcg,
)
from .scenario import Scenario, ScenarioError, load_scenario

__version__ = "0.1.0"
