"""Wire models for the HTTP service.

Scenarios travel as the same document schema used for scenario files
(`ScenarioDoc`), so a YAML file and a request body differ only in
serialization. Times are seconds except where a field name says minutes.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..scenario import ScenarioDoc
from ..simulator import METHOD_LABELS


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str


class SynthRequest(BaseModel):
    seed: int
    n_lots: int = Field(21, ge=1)
    total_capacity: int = Field(3992, ge=1)
    n_entries: int = Field(12, ge=1)
    demand: Optional[int] = Field(None, ge=1)
    allow_overflow: bool = False


class ScenarioResponse(BaseModel):
    scenario: ScenarioDoc


class ValidateRequest(BaseModel):
    scenario: ScenarioDoc


class ValidateResponse(BaseModel):
    valid: bool
    violations: list[str]


class OptimizeRequest(BaseModel):
    scenario: ScenarioDoc
    seed: int = 0
    mode: Literal["exact_fill", "at_most", "auto"] = "at_most"
    planning_occupancy: Optional[float] = Field(None, ge=0.0, le=1.0)


class AssignmentRow(BaseModel):
    vehicle_id: str
    lot_id: str
    drive_s: float
    search_s: float
    walk_s: float
    total_s: float


class OptimizeResponse(BaseModel):
    mode: str
    total_cost_s: float
    mean_cost_s: float
    rows: list[AssignmentRow]


class SimulateRequest(BaseModel):
    """Exactly one of method / mix / assignment selects the behaviour.

    method: one of the labels in METHOD_LABELS.
    mix: strategy-kind value -> weight, normalized by the service.
    assignment: vehicle id -> lot id, replayed with reservation semantics.
    """

    scenario: ScenarioDoc
    method: Optional[str] = None
    mix: Optional[dict[str, float]] = None
    assignment: Optional[dict[str, str]] = None
    runs: int = Field(1, ge=1)
    seed: int = 0
    parallel: bool = False
    full_detect_overhead: float = Field(0.0, ge=0.0)
    reservation: bool = True
    infinite_patience: bool = False
    include_vehicles: bool = True
    include_events: bool = False


class RunRow(BaseModel):
    run: int
    seed: int
    parked: int
    abandoned: int
    failed_total: int
    mean_rerouting_s: float
    failed_searches: dict[str, int]


class VehicleRow(BaseModel):
    run: int
    vehicle_id: str
    entry_id: str
    strategy: str
    arrival_s: float
    attempts: int
    parked_lot: Optional[str]
    parked_floor: Optional[int]
    rerouting_s: float
    drive_s: float
    search_s: float
    walk_s: float
    abandoned: bool


class ConvergencePoint(BaseModel):
    """Running-mean drift after n runs.

    The change fields are None when undefined: on the first row, or when
    the previous mean was zero and the change is unbounded (JSON cannot
    carry infinities).
    """

    n: int
    mean_rerouting_s: float
    rerouting_rel_change: Optional[float]
    failed_profile_drift: Optional[float]


class EventItem(BaseModel):
    run: int
    time_s: float
    vehicle_id: str
    event: str
    lot_id: str
    floor: Optional[int]


class SummaryModel(BaseModel):
    n_runs: int
    fleet_size: int
    mean_parked: float
    mean_abandoned: float
    abandonment_rate: float
    mean_rerouting_s: float
    mean_failed_total: float
    per_lot_failed_mean: dict[str, float]
    mean_drive_s: float
    mean_search_s: float
    mean_walk_s: float


class SimulateResponse(BaseModel):
    summary: SummaryModel
    runs: list[RunRow]
    convergence: list[ConvergencePoint]
    vehicles: Optional[list[VehicleRow]] = None
    events: Optional[list[EventItem]] = None


class CompareRequest(BaseModel):
    scenario: ScenarioDoc
    methods: list[str] = Field(default=list(METHOD_LABELS), min_length=2)
    runs: int = Field(10, ge=1)
    seed: int = 0
    parallel: bool = False


class CompareRow(BaseModel):
    method: str
    runs: int
    mean_rerouting_min: float
    failed_search_total: int
    abandonment_rate: float
    parked_fraction: float


class CompareResponse(BaseModel):
    rows: list[CompareRow]
