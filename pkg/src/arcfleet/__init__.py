"""Multi-depot arc routing for rechargeable fleets, with failure rescheduling.

The library plans multi-trip routes that cover a set of required edges,
simulates missions under dynamic vehicle failures, and reassigns the failed
required trips to active vehicles through a centralized auction.  A
desk-scale exact oracle and an LP-text emitter provide ground truth for
small instances.
"""

from arcfleet.core import (
    Graph,
    Instance,
    InfeasibleError,
    ParseError,
    ValidationError,
    format_time,
    graph_diameter,
    parse_instance,
    parse_time,
    serialize_instance,
    shortest_path,
)
from arcfleet.routing import (
    FleetPlan,
    Route,
    Trip,
    mission_time,
    parse_plan,
    required_edges_of_trip,
    route_time,
    serialize_plan,
    trip_index,
    trip_time,
    validate_plan,
)
from arcfleet.depots import DepotRouteTable, build_depot_routes
from arcfleet.carp import CarpFile, convert_to_instance, parse_carp
from arcfleet.planner import SaConfig, generate_initial_plan, plan_cost
from arcfleet.failures import (
    FailureScenario,
    create_failure_scenarios,
    normalize_failure_time,
    parse_scenario,
    serialize_scenario,
)
from arcfleet.auction import AuctionConfig, Bid, auction, calc_bid, insert_trip, search_nearby
from arcfleet.simulate import END, SimConfig, SimulationReport, coverage_check, simulate
from arcfleet.exact import EnumerationLimits, OracleBudgetError, OracleResult, emit_milp, exact_optimum
from arcfleet.metrics import (
    BoundInputs,
    ScenarioMetrics,
    bound_inputs_from_plan,
    competitive_ratio,
    percent_increase,
    report,
    theoretical_bound,
)

__version__ = "0.1.0"
