"""Discrete-event simulation of the parking search process.

One run owns one isolated mutable world and is fully determined by
(scenario, method, seed): vehicles enter at their actual arrival times,
drive Manhattan legs at cruise speed to their current choice, claim a spot
on arrival or record a failed search and redirect, and give up once their
sampled patience is exhausted. Time is continuous and event-driven; the
arrival-window segments exist only inside the arrival sampler.

Mechanics pinned down here because no single convention is universal:

* A spot is claimed at the moment of admission (capacity safety), and the
  in-lot search time is computed from the occupancy found on arrival, so an
  empty lot costs exactly the stop time.
* The abandonment clock starts at the vehicle's first arrival at any lot;
  the abandon-or-continue decision is evaluated before each new leg.
* Rerouting time is the sum over failed attempts of that leg's drive time
  plus the full-detection overhead (0 by default). Abandoned vehicles are
  excluded from the mean but reported separately.
* Precomputed-plan runs use reservation semantics by default (the planned
  spot is held from assignment time). Without reservations a plan-following
  vehicle that somehow finds its lot full falls back to the minimum-total-
  time rule for redirection.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .assignment import InfeasibleAssignmentError, build_cost_matrix, solve_assignment
from .geo import PlanarCoord, manhattan_distance
from .lot_model import LotState, new_state, occupied_total, search_time, try_admit
from .scenario import Scenario, ScenarioGeometry
from .stochastic import should_abandon
from .strategies import (
    DEFAULT_MULTI_WEIGHTS,
    EQUAL_GROUP_MIX,
    StrategyKind,
    Vehicle,
    next_choice,
    sample_vehicles,
)

# ---------------------------------------------------------------------------
# Methods: what drives lot choice in a run
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixMethod:
    """Heterogeneous strategy groups drawn per vehicle from a mix."""

    mix: Mapping[StrategyKind, float]


@dataclass(frozen=True)
class PlanMethod:
    """Solve the optimal assignment for each run's sampled fleet, then
    simulate vehicles following it."""

    mode: str = "auto"
    planning_occupancy: Optional[float] = None


@dataclass(frozen=True)
class FixedPlanMethod:
    """Simulate vehicles following a caller-supplied vehicle-to-lot map."""

    lot_of: Mapping[str, str]


Method = Union[MixMethod, PlanMethod, FixedPlanMethod]

METHOD_LABELS = ("opt", "g-mix", "nearest", "multicriteria")


def resolve_method(label: str) -> Method:
    """Map a CLI/API method label to a Method value."""
    if label == "opt":
        return PlanMethod()
    if label == "g-mix":
        return MixMethod(EQUAL_GROUP_MIX)
    if label == "nearest":
        return MixMethod({StrategyKind.NO_GUIDANCE_NEAREST: 1.0})
    if label == "multicriteria":
        return MixMethod({StrategyKind.MULTI_CRITERIA: 1.0})
    raise ValueError(f"unknown method label {label!r}; expected one of {METHOD_LABELS}")


@dataclass(frozen=True)
class SimConfig:
    full_detect_overhead: float = 0.0
    reservation: bool = True
    infinite_patience: bool = False
    collect_events: bool = False
    multi_weights: Sequence[float] = DEFAULT_MULTI_WEIGHTS


# ---------------------------------------------------------------------------
# Outcome records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Attempt:
    lot_id: str
    arrived_s: float
    outcome: str  # "parked" | "full"
    floor: Optional[int] = None


@dataclass(frozen=True)
class VehicleRecord:
    vehicle_id: str
    entry_id: str
    strategy: StrategyKind
    actual_arrival: float
    attempts: tuple[Attempt, ...]
    parked_lot: Optional[str]
    parked_floor: Optional[int]
    rerouting_time: float
    total_drive_time: float
    total_search_time: float
    walk_time: float
    abandoned: bool


# Event-log row: (time_s, vehicle_id, event, lot_id, floor). Events are
# enter, arrive_lot, full, park, abandon, reach_destination.
EventRow = tuple[float, str, str, str, Optional[int]]


@dataclass(frozen=True)
class SimOutcome:
    seed: int
    records: tuple[VehicleRecord, ...]
    failed_searches: Mapping[str, int]
    abandonment_count: int
    parked_count: int
    mean_rerouting_time: float
    events: Optional[tuple[EventRow, ...]] = None


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

_PENDING, _ENROUTE, _SEARCHING, _PARKED, _ABANDONED = range(5)


class _Driver:
    """Mutable per-vehicle bookkeeping while its run is in flight."""

    __slots__ = (
        "vehicle", "pos", "visited", "first_attempt_t", "planned_lot", "state",
        "attempts", "rerouting", "drive_time", "search_dur", "walk_dur",
        "parked_lot", "parked_floor",
    )

    def __init__(self, vehicle: Vehicle, pos: PlanarCoord, planned_lot: Optional[str]):
        self.vehicle = vehicle
        self.pos = pos
        self.visited: set[str] = set()
        self.first_attempt_t: Optional[float] = None
        self.planned_lot = planned_lot
        self.state = _PENDING
        self.attempts: list[Attempt] = []
        self.rerouting = 0.0
        self.drive_time = 0.0
        self.search_dur = 0.0
        self.walk_dur = 0.0
        self.parked_lot: Optional[str] = None
        self.parked_floor: Optional[int] = None


class SimulationInvariantError(RuntimeError):
    """An internal conservation or capacity check failed."""


def run_simulation(
    s: Scenario,
    method: Method,
    seed: int,
    config: SimConfig = SimConfig(),
) -> SimOutcome:
    """Execute one seeded run and return its outcome."""
    geom = ScenarioGeometry(s)
    rng = np.random.default_rng(seed)
    mix = method.mix if isinstance(method, MixMethod) else None
    vehicles = sample_vehicles(s, rng, mix=mix)

    plan: Optional[Mapping[str, str]] = None
    if isinstance(method, PlanMethod):
        cost = build_cost_matrix(s, vehicles, method.planning_occupancy, geometry=geom)
        capacities = [lot.capacity for lot in s.lots]
        plan = solve_assignment(cost, capacities, method.mode).lot_of
    elif isinstance(method, FixedPlanMethod):
        plan = dict(method.lot_of)
        _check_fixed_plan(plan, vehicles, geom)

    states = {lot.id: new_state(lot) for lot in s.lots}
    drivers = [
        _Driver(v, geom.entry_pos[v.entry], plan.get(v.id) if plan else None)
        for v in vehicles
    ]
    k = len(drivers)
    counts = [k, 0, 0, 0, 0]
    events: Optional[list[EventRow]] = [] if config.collect_events else None

    def log(t: float, vid: str, event: str, lot_id: str = "", floor: Optional[int] = None) -> None:
        if events is not None:
            events.append((t, vid, event, lot_id, floor))

    def move(d: _Driver, new_state_: int) -> None:
        counts[d.state] -= 1
        counts[new_state_] += 1
        d.state = new_state_

    def audit() -> None:
        if sum(counts) != k:
            raise SimulationInvariantError(f"state counts {counts} do not sum to fleet size {k}")
        claimed = counts[_SEARCHING] + counts[_PARKED]
        occupied = 0
        for lot in s.lots:
            st = states[lot.id]
            for floor, used in enumerate(st.per_floor_occupied):
                if not 0 <= used <= lot.floor_capacities[floor]:
                    raise SimulationInvariantError(
                        f"lot {lot.id} floor {floor} occupancy {used} outside capacity "
                        f"{lot.floor_capacities[floor]}"
                    )
            occupied += occupied_total(st)
        if occupied != claimed:
            raise SimulationInvariantError(
                f"occupied spots {occupied} != vehicles holding spots {claimed}"
            )

    heap: list[tuple[float, int, str, int, tuple]] = []
    seq = 0

    def push(t: float, tag: str, idx: int, payload: tuple = ()) -> None:
        nonlocal seq
        heapq.heappush(heap, (t, seq, tag, idx, payload))
        seq += 1

    def effective_patience(d: _Driver) -> float:
        return math.inf if config.infinite_patience else d.vehicle.patience

    def choose(d: _Driver, now: float) -> Optional[str]:
        if d.planned_lot is not None:
            return d.planned_lot
        return next_choice(
            d.vehicle.strategy, d.visited, d.pos, geom, states, config.multi_weights
        )

    def depart_for(d: _Driver, idx: int, now: float, lot_id: str) -> None:
        leg = manhattan_distance(d.pos, geom.lot_pos[lot_id]) / s.kinematics.cruise_speed
        push(now + leg, "arrive", idx, (lot_id, leg))

    def abandon(d: _Driver, idx: int, now: float) -> None:
        move(d, _ABANDONED)
        log(now, d.vehicle.id, "abandon")

    for idx, d in enumerate(drivers):
        push(d.vehicle.actual_arrival, "enter", idx)

    while heap:
        now, _, tag, idx, payload = heapq.heappop(heap)
        d = drivers[idx]

        if tag == "enter":
            move(d, _ENROUTE)
            log(now, d.vehicle.id, "enter")
            target = choose(d, now)
            if target is None:
                abandon(d, idx, now)
            else:
                depart_for(d, idx, now, target)

        elif tag == "arrive":
            lot_id, leg = payload
            lot = geom.lots_by_id[lot_id]
            st = states[lot_id]
            d.drive_time += leg
            if d.first_attempt_t is None:
                d.first_attempt_t = now
            log(now, d.vehicle.id, "arrive_lot", lot_id)
            ts = search_time(lot, st, s.kinematics)
            floor = try_admit(st, lot)
            if floor is None:
                if d.planned_lot is not None and config.reservation:
                    raise SimulationInvariantError(
                        f"reserved spot missing for {d.vehicle.id} at lot {lot_id}"
                    )
                d.attempts.append(Attempt(lot_id, now, "full"))
                d.rerouting += leg + config.full_detect_overhead
                d.visited.add(lot_id)
                d.pos = geom.lot_pos[lot_id]
                if d.planned_lot is not None:
                    # Plan is broken; redirect like a minimum-total-time driver.
                    d.planned_lot = None
                    d.vehicle = _with_strategy(d.vehicle, StrategyKind.MIN_TOTAL)
                log(now, d.vehicle.id, "full", lot_id)
                push(now + config.full_detect_overhead, "decide", idx)
            else:
                d.attempts.append(Attempt(lot_id, now, "parked", floor))
                d.search_dur = ts
                d.parked_lot = lot_id
                d.parked_floor = floor
                d.pos = geom.lot_pos[lot_id]
                move(d, _SEARCHING)
                push(now + ts, "park_done", idx, (lot_id, floor))

        elif tag == "decide":
            elapsed = now - d.first_attempt_t if d.first_attempt_t is not None else 0.0
            if should_abandon(elapsed, effective_patience(d)):
                abandon(d, idx, now)
            else:
                target = choose(d, now)
                if target is None:
                    abandon(d, idx, now)
                else:
                    depart_for(d, idx, now, target)

        elif tag == "park_done":
            lot_id, floor = payload
            move(d, _PARKED)
            log(now, d.vehicle.id, "park", lot_id, floor)
            d.walk_dur = geom.walk_dist[lot_id] / s.kinematics.walk_speed
            push(now + d.walk_dur, "reach_dest", idx, (lot_id,))

        elif tag == "reach_dest":
            (lot_id,) = payload
            log(now, d.vehicle.id, "reach_destination", lot_id)

        else:  # pragma: no cover - unreachable
            raise SimulationInvariantError(f"unknown event tag {tag}")

        audit()

    if counts[_PARKED] + counts[_ABANDONED] != k:
        raise SimulationInvariantError(
            f"run ended with unfinished vehicles: parked={counts[_PARKED]}, "
            f"abandoned={counts[_ABANDONED]}, fleet={k}"
        )

    records = tuple(
        VehicleRecord(
            vehicle_id=d.vehicle.id,
            entry_id=d.vehicle.entry,
            strategy=d.vehicle.strategy,
            actual_arrival=d.vehicle.actual_arrival,
            attempts=tuple(d.attempts),
            parked_lot=d.parked_lot,
            parked_floor=d.parked_floor,
            rerouting_time=d.rerouting,
            total_drive_time=d.drive_time,
            total_search_time=d.search_dur,
            walk_time=d.walk_dur,
            abandoned=d.state == _ABANDONED,
        )
        for d in drivers
    )
    parked = [r for r in records if not r.abandoned]
    mean_reroute = sum(r.rerouting_time for r in parked) / len(parked) if parked else 0.0
    return SimOutcome(
        seed=seed,
        records=records,
        failed_searches={lot.id: states[lot.id].failed_search_count for lot in s.lots},
        abandonment_count=counts[_ABANDONED],
        parked_count=counts[_PARKED],
        mean_rerouting_time=mean_reroute,
        events=tuple(events) if events is not None else None,
    )


def _with_strategy(v: Vehicle, kind: StrategyKind) -> Vehicle:
    from dataclasses import replace

    return replace(v, strategy=kind)


def _check_fixed_plan(
    plan: Mapping[str, str], vehicles: Sequence[Vehicle], geom: ScenarioGeometry
) -> None:
    fleet_ids = {v.id for v in vehicles}
    plan_ids = set(plan)
    if plan_ids != fleet_ids:
        missing = sorted(fleet_ids - plan_ids)[:3]
        extra = sorted(plan_ids - fleet_ids)[:3]
        raise InfeasibleAssignmentError(
            f"assignment does not cover the sampled fleet "
            f"(plan has {len(plan_ids)} vehicles, fleet has {len(fleet_ids)}; "
            f"missing e.g. {missing}, extra e.g. {extra})"
        )
    counts: dict[str, int] = {}
    for lot_id in plan.values():
        if lot_id not in geom.lots_by_id:
            raise InfeasibleAssignmentError(f"assignment references unknown lot {lot_id}")
        counts[lot_id] = counts.get(lot_id, 0) + 1
    for lot_id, n in counts.items():
        cap = geom.lots_by_id[lot_id].capacity
        if n > cap:
            raise InfeasibleAssignmentError(
                f"assignment sends {n} vehicles to lot {lot_id} with capacity {cap}"
            )


def rerouting_time_of(
    record: VehicleRecord,
    s: Scenario,
    full_detect_overhead: float = 0.0,
    geometry: Optional[ScenarioGeometry] = None,
) -> float:
    """Recompute rerouting time from a record by replaying its legs.

    Sums, over attempts that found a full lot, the Manhattan drive time of
    the leg that led there plus the detection overhead. Zero when the first
    attempt parked.
    """
    geom = geometry or ScenarioGeometry(s)
    pos = geom.entry_pos[record.entry_id]
    total = 0.0
    for attempt in record.attempts:
        leg = manhattan_distance(pos, geom.lot_pos[attempt.lot_id]) / s.kinematics.cruise_speed
        if attempt.outcome == "full":
            total += leg + full_detect_overhead
        pos = geom.lot_pos[attempt.lot_id]
    return total


# ---------------------------------------------------------------------------
# Replication harness
# ---------------------------------------------------------------------------

def monte_carlo(
    s: Scenario,
    method: Method,
    n_runs: int,
    base_seed: int,
    parallel: bool = False,
    config: SimConfig = SimConfig(),
) -> list[SimOutcome]:
    """Independent replications; run r uses seed base_seed + r.

    Parallel execution farms runs out to worker threads; each run owns its
    world, and results come back in run order either way.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    seeds = [base_seed + r for r in range(n_runs)]
    if not parallel:
        return [run_simulation(s, method, seed, config) for seed in seeds]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(lambda seed: run_simulation(s, method, seed, config), seeds))


@dataclass(frozen=True)
class MethodComparison:
    label: str
    n_runs: int
    mean_rerouting_min: float
    failed_search_total: int
    abandonment_rate: float
    parked_fraction: float


def compare_methods(
    s: Scenario,
    methods: Sequence[tuple[str, Method]],
    n_runs: int,
    base_seed: int,
    config: SimConfig = SimConfig(),
    parallel: bool = False,
) -> tuple[list[MethodComparison], dict[str, list[SimOutcome]]]:
    """Run every method over the same seed stream and aggregate.

    Common random numbers: method r-th runs share seeds, so fleets (entries,
    arrival times, patience) are identical across methods and differences
    come from the methods themselves. The pooled rerouting mean is taken
    over non-abandoned vehicles across all runs.
    """
    if len(methods) < 2:
        raise ValueError("compare_methods needs at least two methods")
    labels = [label for label, _ in methods]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate method labels: {labels}")

    rows = []
    outcomes_by_label: dict[str, list[SimOutcome]] = {}
    for label, method in methods:
        outcomes = monte_carlo(s, method, n_runs, base_seed, parallel=parallel, config=config)
        outcomes_by_label[label] = outcomes
        reroutes = [
            r.rerouting_time for o in outcomes for r in o.records if not r.abandoned
        ]
        total_vehicles = sum(len(o.records) for o in outcomes)
        rows.append(
            MethodComparison(
                label=label,
                n_runs=n_runs,
                mean_rerouting_min=(sum(reroutes) / len(reroutes) / 60.0) if reroutes else 0.0,
                failed_search_total=sum(sum(o.failed_searches.values()) for o in outcomes),
                abandonment_rate=sum(o.abandonment_count for o in outcomes) / total_vehicles,
                parked_fraction=sum(o.parked_count for o in outcomes) / total_vehicles,
            )
        )
    return rows, outcomes_by_label
