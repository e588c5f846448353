"""Parking guidance toolkit: exact lot assignment and stochastic
simulation of driver search behaviour on a planar city grid."""

from .assignment import (
    Assignment,
    AssignMode,
    CostMatrix,
    InfeasibleAssignmentError,
    brute_force_assignment,
    build_cost_matrix,
    solve_assignment,
)
from .geo import GeoCoord, PlanarCoord, manhattan_distance, miller_project, miller_unproject, travel_time
from .lot_model import LotState, new_state, search_time, search_time_at, try_admit
from .scenario import (
    Scenario,
    ScenarioGeometry,
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
    load_scenario_file,
    save_scenario,
    synth_scenario,
    validate_scenario,
)
from .simulator import (
    FixedPlanMethod,
    MixMethod,
    PlanMethod,
    SimConfig,
    SimOutcome,
    VehicleRecord,
    compare_methods,
    monte_carlo,
    resolve_method,
    run_simulation,
)
from .strategies import EQUAL_GROUP_MIX, StrategyKind, Vehicle, rank_lots, sample_vehicles
from .stochastic import ArrivalParams, PatienceParams, TimeWindow

__version__ = "0.1.0"

__all__ = [
    "ArrivalParams",
    "AssignMode",
    "Assignment",
    "CostMatrix",
    "EQUAL_GROUP_MIX",
    "FixedPlanMethod",
    "GeoCoord",
    "InfeasibleAssignmentError",
    "LotState",
    "MixMethod",
    "PatienceParams",
    "PlanMethod",
    "PlanarCoord",
    "Scenario",
    "ScenarioGeometry",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SimConfig",
    "SimOutcome",
    "StrategyKind",
    "TimeWindow",
    "Vehicle",
    "VehicleRecord",
    "brute_force_assignment",
    "build_cost_matrix",
    "compare_methods",
    "load_scenario",
    "load_scenario_file",
    "manhattan_distance",
    "miller_project",
    "miller_unproject",
    "monte_carlo",
    "new_state",
    "rank_lots",
    "resolve_method",
    "run_simulation",
    "sample_vehicles",
    "save_scenario",
    "search_time",
    "search_time_at",
    "solve_assignment",
    "synth_scenario",
    "travel_time",
    "try_admit",
    "validate_scenario",
]
