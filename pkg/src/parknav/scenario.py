"""World model: lots, entry points, destination, demand, and kinematics.

Two representations exist. The *document* (pydantic models, YAML/JSON on
disk and on the wire) uses degrees for angles and short config keys. The
*domain* model (frozen dataclasses) uses radians and descriptive names and
is what the optimizer and simulator consume. A scenario is immutable after
construction and safe to share across concurrent replications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .geo import GeoCoord, PlanarCoord, manhattan_distance, miller_project
from .stochastic import ArrivalParams, PatienceParams, TimeWindow


class ScenarioParseError(ValueError):
    """Raised when a scenario document cannot be parsed at all."""


class ScenarioValidationError(ValueError):
    """Raised when a parsed scenario violates invariants.

    ``violations`` lists every violated rule, one message each.
    """

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid scenario:\n" + "\n".join(f"- {v}" for v in self.violations))


# ---------------------------------------------------------------------------
# Document schema (file + wire format; angles in degrees, times in seconds,
# lengths in meters)
# ---------------------------------------------------------------------------

class GeoPointDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    lat: float = Field(gt=-90, lt=90)
    lon: float = Field(ge=-180, lt=180)


class RegionDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    min_lat: float = Field(gt=-90, lt=90)
    min_lon: float = Field(ge=-180, lt=180)
    max_lat: float = Field(gt=-90, lt=90)
    max_lon: float = Field(ge=-180, lt=180)


class KinematicsDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    W: float = Field(gt=0, description="parking spot width, meters")
    v_c: float = Field(gt=0, description="cruising speed, m/s")
    v_w: float = Field(gt=0, description="walking speed, m/s")
    v_ud: float = Field(gt=0, description="ramp speed, m/s")
    t_stop: float = Field(gt=0, description="parking maneuver time, seconds")
    t_turn: float = Field(gt=0, description="U-turn time between ramps, seconds")


class ArrivalDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    lambda_segment: float = Field(gt=0)
    noise_sigma: float = Field(ge=0)


class PatienceDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    shape: float = Field(gt=0)
    scale: float = Field(gt=0)


class TimeWindowDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    start: float
    end: float
    segment: float = Field(gt=0)


class LotDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    lat: float = Field(gt=-90, lt=90)
    lon: float = Field(ge=-180, lt=180)
    capacity: int = Field(gt=0)
    floors: int = Field(gt=0)
    floor_capacities: list[int]
    ramp_length: float = Field(ge=0)


class EntryDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    lat: float = Field(gt=-90, lt=90)
    lon: float = Field(ge=-180, lt=180)


class ScenarioDoc(BaseModel):
    """On-disk / on-wire scenario document."""

    model_config = ConfigDict(extra="forbid")

    destination: GeoPointDoc
    region: RegionDoc
    kinematics: KinematicsDoc
    arrival: ArrivalDoc
    patience: PatienceDoc
    exclusion_radius: float = Field(ge=0)
    time_window: TimeWindowDoc
    demand_K: int = Field(gt=0)
    lots: list[LotDoc]
    entries: list[EntryDoc]
    allow_overflow: bool = False


# ---------------------------------------------------------------------------
# Domain model (radians, SI units)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KinematicParams:
    """Speeds and maneuver times shared by all vehicles."""

    spot_width: float
    cruise_speed: float
    walk_speed: float
    ramp_speed: float
    stop_time: float
    turn_time: float

    def __post_init__(self) -> None:
        for name in ("spot_width", "cruise_speed", "walk_speed", "ramp_speed", "stop_time", "turn_time"):
            if getattr(self, name) <= 0:
                raise ValueError(f"kinematic parameter {name} must be > 0")


# Ordinary parking-facility magnitudes; configuration, not ground truth.
DEFAULT_KINEMATICS = KinematicParams(
    spot_width=2.5,
    cruise_speed=2.78,
    walk_speed=1.2,
    ramp_speed=2.78,
    stop_time=30.0,
    turn_time=10.0,
)
DEFAULT_ARRIVAL = ArrivalParams(lambda_segment=6.0, noise_sigma=120.0)
DEFAULT_PATIENCE = PatienceParams(shape=2.0, scale=300.0)
DEFAULT_EXCLUSION_RADIUS = 300.0
DEFAULT_TIME_WINDOW = TimeWindow(start=36000.0, end=43200.0, segment=600.0)


@dataclass(frozen=True)
class Region:
    """Rectangular study region, radians."""

    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    def contains(self, g: GeoCoord) -> bool:
        return self.min_lat <= g.lat <= self.max_lat and self.min_lon <= g.lon <= self.max_lon


@dataclass(frozen=True)
class ParkingLot:
    id: str
    location: GeoCoord
    capacity: int
    floors: int
    floor_capacities: tuple[int, ...]
    ramp_length: float


@dataclass(frozen=True)
class EntryPoint:
    id: str
    location: GeoCoord


@dataclass(frozen=True)
class Scenario:
    destination: GeoCoord
    region: Region
    lots: tuple[ParkingLot, ...]
    entries: tuple[EntryPoint, ...]
    demand: int
    kinematics: KinematicParams
    arrival: ArrivalParams
    patience: PatienceParams
    exclusion_radius: float
    time_window: TimeWindow
    allow_overflow: bool = False

    @property
    def total_capacity(self) -> int:
        return sum(lot.capacity for lot in self.lots)


def validate_scenario(s: Scenario) -> list[str]:
    """Return every violated invariant, empty when the scenario is sound."""
    violations: list[str] = []

    if s.region.min_lat >= s.region.max_lat:
        violations.append("region: min_lat must be strictly below max_lat")
    if s.region.min_lon >= s.region.max_lon:
        violations.append("region: min_lon must be strictly below max_lon")

    if not s.lots:
        violations.append("lots: at least one parking lot is required")
    if not s.entries:
        violations.append("entries: at least one entry point is required")

    seen_lots: set[str] = set()
    for lot in s.lots:
        if lot.id in seen_lots:
            violations.append(f"lot {lot.id}: duplicate id")
        seen_lots.add(lot.id)
        if lot.capacity <= 0:
            violations.append(f"lot {lot.id}: capacity must be positive")
        if lot.floors <= 0:
            violations.append(f"lot {lot.id}: floors must be positive")
        if len(lot.floor_capacities) != lot.floors:
            violations.append(
                f"lot {lot.id}: floor_capacities has {len(lot.floor_capacities)} entries, expected {lot.floors}"
            )
        if any(c <= 0 for c in lot.floor_capacities):
            violations.append(f"lot {lot.id}: every floor capacity must be positive")
        if sum(lot.floor_capacities) != lot.capacity:
            violations.append(
                f"lot {lot.id}: floor capacities sum to {sum(lot.floor_capacities)}, expected capacity {lot.capacity}"
            )
        if lot.ramp_length < 0:
            violations.append(f"lot {lot.id}: ramp_length must be >= 0")
        if not s.region.contains(lot.location):
            violations.append(f"lot {lot.id}: location outside region bounds")

    seen_entries: set[str] = set()
    for entry in s.entries:
        if entry.id in seen_entries:
            violations.append(f"entry {entry.id}: duplicate id")
        seen_entries.add(entry.id)
        if not s.region.contains(entry.location):
            violations.append(f"entry {entry.id}: location outside region bounds")

    if not s.region.contains(s.destination):
        violations.append("destination: location outside region bounds")

    if s.demand <= 0:
        violations.append("demand_K: must be positive")
    total = s.total_capacity
    if s.demand > total and not s.allow_overflow:
        violations.append(
            f"demand_K: demand {s.demand} exceeds total capacity {total} and allow_overflow is not set"
        )

    if s.exclusion_radius < 0:
        violations.append("exclusion_radius: must be >= 0")

    return violations


# ---------------------------------------------------------------------------
# Document <-> domain conversion and file I/O
# ---------------------------------------------------------------------------

def _format_pydantic_errors(exc: ValidationError) -> list[str]:
    messages = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"])
        messages.append(f"{loc}: {err['msg']}")
    return messages


def scenario_from_doc(doc: ScenarioDoc) -> Scenario:
    """Build the domain scenario; raises ScenarioValidationError if the
    document violates any invariant."""
    try:
        s = Scenario(
            destination=GeoCoord(math.radians(doc.destination.lat), math.radians(doc.destination.lon)),
            region=Region(
                min_lat=math.radians(doc.region.min_lat),
                min_lon=math.radians(doc.region.min_lon),
                max_lat=math.radians(doc.region.max_lat),
                max_lon=math.radians(doc.region.max_lon),
            ),
            lots=tuple(
                ParkingLot(
                    id=lot.id,
                    location=GeoCoord(math.radians(lot.lat), math.radians(lot.lon)),
                    capacity=lot.capacity,
                    floors=lot.floors,
                    floor_capacities=tuple(lot.floor_capacities),
                    ramp_length=lot.ramp_length,
                )
                for lot in doc.lots
            ),
            entries=tuple(
                EntryPoint(id=e.id, location=GeoCoord(math.radians(e.lat), math.radians(e.lon)))
                for e in doc.entries
            ),
            demand=doc.demand_K,
            kinematics=KinematicParams(
                spot_width=doc.kinematics.W,
                cruise_speed=doc.kinematics.v_c,
                walk_speed=doc.kinematics.v_w,
                ramp_speed=doc.kinematics.v_ud,
                stop_time=doc.kinematics.t_stop,
                turn_time=doc.kinematics.t_turn,
            ),
            arrival=ArrivalParams(doc.arrival.lambda_segment, doc.arrival.noise_sigma),
            patience=PatienceParams(doc.patience.shape, doc.patience.scale),
            exclusion_radius=doc.exclusion_radius,
            time_window=TimeWindow(doc.time_window.start, doc.time_window.end, doc.time_window.segment),
            allow_overflow=doc.allow_overflow,
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioValidationError):
            raise
        raise ScenarioValidationError([str(exc)]) from exc

    violations = validate_scenario(s)
    if violations:
        raise ScenarioValidationError(violations)
    return s


def scenario_to_doc(s: Scenario) -> ScenarioDoc:
    return ScenarioDoc(
        destination=GeoPointDoc(lat=math.degrees(s.destination.lat), lon=math.degrees(s.destination.lon)),
        region=RegionDoc(
            min_lat=math.degrees(s.region.min_lat),
            min_lon=math.degrees(s.region.min_lon),
            max_lat=math.degrees(s.region.max_lat),
            max_lon=math.degrees(s.region.max_lon),
        ),
        kinematics=KinematicsDoc(
            W=s.kinematics.spot_width,
            v_c=s.kinematics.cruise_speed,
            v_w=s.kinematics.walk_speed,
            v_ud=s.kinematics.ramp_speed,
            t_stop=s.kinematics.stop_time,
            t_turn=s.kinematics.turn_time,
        ),
        arrival=ArrivalDoc(lambda_segment=s.arrival.lambda_segment, noise_sigma=s.arrival.noise_sigma),
        patience=PatienceDoc(shape=s.patience.shape, scale=s.patience.scale),
        exclusion_radius=s.exclusion_radius,
        time_window=TimeWindowDoc(start=s.time_window.start, end=s.time_window.end, segment=s.time_window.segment),
        demand_K=s.demand,
        lots=[
            LotDoc(
                id=lot.id,
                lat=math.degrees(lot.location.lat),
                lon=math.degrees(lot.location.lon),
                capacity=lot.capacity,
                floors=lot.floors,
                floor_capacities=list(lot.floor_capacities),
                ramp_length=lot.ramp_length,
            )
            for lot in s.lots
        ],
        entries=[
            EntryDoc(id=e.id, lat=math.degrees(e.location.lat), lon=math.degrees(e.location.lon))
            for e in s.entries
        ],
        allow_overflow=s.allow_overflow,
    )


def load_scenario(text: str) -> Scenario:
    """Parse, schema-check, and validate a scenario document (YAML or JSON)."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        detail = str(exc)
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            detail = f"line {mark.line + 1}, column {mark.column + 1}: {getattr(exc, 'problem', detail)}"
        raise ScenarioParseError(f"scenario document is not valid YAML ({detail})") from exc
    if not isinstance(raw, dict):
        raise ScenarioParseError("scenario document must be a mapping of top-level keys")
    try:
        doc = ScenarioDoc.model_validate(raw)
    except ValidationError as exc:
        raise ScenarioValidationError(_format_pydantic_errors(exc)) from exc
    return scenario_from_doc(doc)


def load_scenario_file(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


def save_scenario(s: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_scenario(s))


def dump_scenario(s: Scenario) -> str:
    doc = scenario_to_doc(s)
    return yaml.safe_dump(doc.model_dump(), sort_keys=False)


# ---------------------------------------------------------------------------
# Synthetic scenario generator
# ---------------------------------------------------------------------------

# Rectangle around the case-study stadium; purely synthetic stand-in bounds.
DEFAULT_REGION = Region(
    min_lat=math.radians(37.8590),
    min_lon=math.radians(-122.2760),
    max_lat=math.radians(37.8800),
    max_lon=math.radians(-122.2420),
)
DEFAULT_DESTINATION = GeoCoord(math.radians(37.8712), math.radians(-122.2508))


def _perimeter_point(region: Region, t: float) -> GeoCoord:
    """Point on the region boundary at perimeter fraction t in [0, 1)."""
    dlat = region.max_lat - region.min_lat
    dlon = region.max_lon - region.min_lon
    perim = 2 * (dlat + dlon)
    d = (t % 1.0) * perim
    if d < dlon:
        return GeoCoord(region.min_lat, region.min_lon + d)
    d -= dlon
    if d < dlat:
        return GeoCoord(region.min_lat + d, region.max_lon)
    d -= dlat
    if d < dlon:
        return GeoCoord(region.max_lat, region.max_lon - d)
    d -= dlon
    return GeoCoord(region.max_lat - d, region.min_lon)


def _partition(rng: np.random.Generator, total: int, parts: int) -> list[int]:
    """Split `total` into `parts` strictly positive integers summing exactly."""
    if parts > total:
        raise ValueError(f"cannot split {total} into {parts} positive parts")
    extra = rng.multinomial(total - parts, [1.0 / parts] * parts)
    return [1 + int(e) for e in extra]


def synth_scenario(
    seed: int,
    n_lots: int = 21,
    total_capacity: int = 3992,
    n_entries: int = 12,
    region: Optional[Region] = None,
    *,
    destination: Optional[GeoCoord] = None,
    demand: Optional[int] = None,
    allow_overflow: bool = False,
    kinematics: KinematicParams = DEFAULT_KINEMATICS,
    arrival: ArrivalParams = DEFAULT_ARRIVAL,
    patience: PatienceParams = DEFAULT_PATIENCE,
    exclusion_radius: float = DEFAULT_EXCLUSION_RADIUS,
    time_window: TimeWindow = DEFAULT_TIME_WINDOW,
) -> Scenario:
    """Generate a deterministic synthetic scenario.

    Lots are placed uniformly inside the region with capacities partitioned
    to sum exactly to `total_capacity`; floor counts are sampled from
    {1, 2, 3}; entries sit on the region boundary. Demand defaults to the
    total supply.
    """
    if n_lots < 1:
        raise ValueError("n_lots must be >= 1")
    if n_entries < 1:
        raise ValueError("n_entries must be >= 1")
    if total_capacity < n_lots:
        raise ValueError(f"total_capacity {total_capacity} cannot cover {n_lots} lots with >= 1 space each")

    region = region or DEFAULT_REGION
    destination = destination or DEFAULT_DESTINATION
    if not region.contains(destination):
        destination = GeoCoord(
            (region.min_lat + region.max_lat) / 2,
            (region.min_lon + region.max_lon) / 2,
        )

    rng = np.random.default_rng(seed)
    capacities = _partition(rng, total_capacity, n_lots)

    # Keep lots off the exact boundary so containment is unambiguous.
    lat_margin = 0.05 * (region.max_lat - region.min_lat)
    lon_margin = 0.05 * (region.max_lon - region.min_lon)

    lots = []
    for i in range(n_lots):
        lat = float(rng.uniform(region.min_lat + lat_margin, region.max_lat - lat_margin))
        lon = float(rng.uniform(region.min_lon + lon_margin, region.max_lon - lon_margin))
        cap = capacities[i]
        floors = min(int(rng.integers(1, 4)), cap)
        floor_caps = _partition(rng, cap, floors)
        ramp = 0.0 if floors == 1 else float(np.round(rng.uniform(15.0, 45.0), 1))
        lots.append(
            ParkingLot(
                id=f"lot{i + 1:02d}",
                location=GeoCoord(lat, lon),
                capacity=cap,
                floors=floors,
                floor_capacities=tuple(floor_caps),
                ramp_length=ramp,
            )
        )

    rotation = float(rng.random())
    entries = tuple(
        EntryPoint(id=f"ent{j + 1:02d}", location=_perimeter_point(region, rotation + j / n_entries))
        for j in range(n_entries)
    )

    s = Scenario(
        destination=destination,
        region=region,
        lots=tuple(lots),
        entries=entries,
        demand=demand if demand is not None else total_capacity,
        kinematics=kinematics,
        arrival=arrival,
        patience=patience,
        exclusion_radius=exclusion_radius,
        time_window=time_window,
        allow_overflow=allow_overflow,
    )
    violations = validate_scenario(s)
    if violations:
        raise ScenarioValidationError(violations)
    return s


def with_demand(s: Scenario, demand: int, allow_overflow: bool = False) -> Scenario:
    """Copy of a scenario with a different demand level."""
    return replace(s, demand=demand, allow_overflow=allow_overflow)


# ---------------------------------------------------------------------------
# Projected view
# ---------------------------------------------------------------------------

class ScenarioGeometry:
    """Planar projection of a scenario with per-lot walk distances cached.

    Built once per run; read-only afterwards.
    """

    def __init__(self, s: Scenario):
        self.scenario = s
        self.dest_pos = miller_project(s.destination)
        self.lot_ids = tuple(lot.id for lot in s.lots)
        self.lots_by_id = {lot.id: lot for lot in s.lots}
        self.lot_pos = {lot.id: miller_project(lot.location) for lot in s.lots}
        self.entry_pos = {e.id: miller_project(e.location) for e in s.entries}
        self.walk_dist = {
            lot_id: manhattan_distance(pos, self.dest_pos) for lot_id, pos in self.lot_pos.items()
        }
        # Strict inequality so a zero radius excludes nothing, including a
        # lot sitting exactly at the destination.
        self.core_lots = frozenset(
            lot_id for lot_id, d in self.walk_dist.items() if d < s.exclusion_radius
        )

    def drive_dist(self, position: PlanarCoord, lot_id: str) -> float:
        return manhattan_distance(position, self.lot_pos[lot_id])
