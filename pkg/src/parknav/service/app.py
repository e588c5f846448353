"""HTTP facade over the core library.

Stateless: every request carries its scenario document, and all outputs
are pure functions of (scenario, seed, flags). Invalid scenario documents
map to 400 with the violation list, infeasible optimization or replay
requests to 409.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..assignment import InfeasibleAssignmentError, build_cost_matrix, solve_assignment
from ..report import convergence_series, summarize
from ..scenario import (
    Scenario,
    ScenarioDoc,
    ScenarioValidationError,
    scenario_from_doc,
    scenario_to_doc,
    synth_scenario,
)
from ..simulator import (
    FixedPlanMethod,
    Method,
    MixMethod,
    SimConfig,
    compare_methods,
    monte_carlo,
    resolve_method,
)
from ..strategies import EQUAL_GROUP_MIX, StrategyKind, sample_vehicles
from . import schemas


def _scenario_or_400(doc: ScenarioDoc) -> Scenario:
    try:
        return scenario_from_doc(doc)
    except ScenarioValidationError as e:
        raise HTTPException(status_code=400, detail={"violations": e.violations})


def _finite_or_none(x: Optional[float]) -> Optional[float]:
    # json.dumps(allow_nan=False) in the response layer rejects inf.
    if x is None or not math.isfinite(x):
        return None
    return x


def _method_from_request(req: schemas.SimulateRequest) -> Method:
    given = [
        name
        for name, value in (
            ("method", req.method), ("mix", req.mix), ("assignment", req.assignment),
        )
        if value is not None
    ]
    if len(given) > 1:
        raise HTTPException(400, detail=f"give at most one of method/mix/assignment, got {given}")
    if req.method is not None:
        try:
            return resolve_method(req.method)
        except ValueError as e:
            raise HTTPException(400, detail=str(e))
    if req.mix is not None:
        try:
            mix = {StrategyKind(k): w for k, w in req.mix.items()}
        except ValueError as e:
            raise HTTPException(400, detail=f"unknown strategy kind in mix: {e}")
        if any(w < 0 for w in mix.values()) or sum(mix.values()) <= 0:
            raise HTTPException(400, detail="mix weights must be nonnegative with a positive sum")
        return MixMethod(mix)
    if req.assignment is not None:
        return FixedPlanMethod(req.assignment)
    return MixMethod(EQUAL_GROUP_MIX)


def create_app() -> FastAPI:
    app = FastAPI(title="parknav", version=__version__)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/scenario/synth", response_model=schemas.ScenarioResponse)
    def synth(req: schemas.SynthRequest) -> schemas.ScenarioResponse:
        try:
            s = synth_scenario(
                seed=req.seed,
                n_lots=req.n_lots,
                total_capacity=req.total_capacity,
                n_entries=req.n_entries,
                demand=req.demand,
                allow_overflow=req.allow_overflow,
            )
        except (ValueError, ScenarioValidationError) as e:
            raise HTTPException(400, detail=str(e))
        return schemas.ScenarioResponse(scenario=scenario_to_doc(s))

    @app.post("/scenario/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
        try:
            scenario_from_doc(req.scenario)
        except ScenarioValidationError as e:
            return schemas.ValidateResponse(valid=False, violations=e.violations)
        return schemas.ValidateResponse(valid=True, violations=[])

    @app.post("/optimize", response_model=schemas.OptimizeResponse)
    def optimize(req: schemas.OptimizeRequest) -> schemas.OptimizeResponse:
        s = _scenario_or_400(req.scenario)
        vehicles = sample_vehicles(s, np.random.default_rng(req.seed))
        cost = build_cost_matrix(s, vehicles, req.planning_occupancy)
        capacities = [lot.capacity for lot in s.lots]
        try:
            assignment = solve_assignment(cost, capacities, req.mode)
        except InfeasibleAssignmentError as e:
            raise HTTPException(409, detail=str(e))
        mode = req.mode
        if mode == "auto":
            mode = "exact_fill" if len(vehicles) == sum(capacities) else "at_most"
        lot_col = {lot: j for j, lot in enumerate(cost.lot_ids)}
        rows = []
        for i, vid in enumerate(cost.vehicle_ids):
            lot = assignment.lot_of[vid]
            j = lot_col[lot]
            drive = float(cost.drive_s[i, j])
            search = float(cost.search_s[i, j])
            walk = float(cost.walk_s[i, j])
            rows.append(
                schemas.AssignmentRow(
                    vehicle_id=vid, lot_id=lot, drive_s=drive, search_s=search,
                    walk_s=walk, total_s=drive + search + walk,
                )
            )
        return schemas.OptimizeResponse(
            mode=mode,
            total_cost_s=assignment.total_cost,
            mean_cost_s=assignment.total_cost / len(vehicles),
            rows=rows,
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
        s = _scenario_or_400(req.scenario)
        method = _method_from_request(req)
        config = SimConfig(
            full_detect_overhead=req.full_detect_overhead,
            reservation=req.reservation,
            infinite_patience=req.infinite_patience,
            collect_events=req.include_events,
        )
        try:
            outcomes = monte_carlo(
                s, method, req.runs, req.seed, parallel=req.parallel, config=config
            )
        except InfeasibleAssignmentError as e:
            raise HTTPException(409, detail=str(e))

        summary = summarize(outcomes)
        run_rows = [
            schemas.RunRow(
                run=i,
                seed=o.seed,
                parked=o.parked_count,
                abandoned=o.abandonment_count,
                failed_total=sum(o.failed_searches.values()),
                mean_rerouting_s=o.mean_rerouting_time,
                failed_searches=dict(o.failed_searches),
            )
            for i, o in enumerate(outcomes)
        ]
        conv = [
            schemas.ConvergencePoint(
                n=c.n,
                mean_rerouting_s=c.mean_rerouting_s,
                rerouting_rel_change=_finite_or_none(c.rerouting_rel_change),
                failed_profile_drift=_finite_or_none(c.failed_profile_drift),
            )
            for c in convergence_series(outcomes)
        ]
        vehicles = None
        if req.include_vehicles:
            vehicles = [
                schemas.VehicleRow(
                    run=i,
                    vehicle_id=r.vehicle_id,
                    entry_id=r.entry_id,
                    strategy=r.strategy.value,
                    arrival_s=r.actual_arrival,
                    attempts=len(r.attempts),
                    parked_lot=r.parked_lot,
                    parked_floor=r.parked_floor,
                    rerouting_s=r.rerouting_time,
                    drive_s=r.total_drive_time,
                    search_s=r.total_search_time,
                    walk_s=r.walk_time,
                    abandoned=r.abandoned,
                )
                for i, o in enumerate(outcomes)
                for r in o.records
            ]
        events = None
        if req.include_events:
            events = [
                schemas.EventItem(
                    run=i, time_s=e[0], vehicle_id=e[1], event=e[2],
                    lot_id=e[3], floor=e[4],
                )
                for i, o in enumerate(outcomes)
                for e in (o.events or ())
            ]
        return schemas.SimulateResponse(
            summary=schemas.SummaryModel(
                n_runs=summary.n_runs,
                fleet_size=summary.fleet_size,
                mean_parked=summary.mean_parked,
                mean_abandoned=summary.mean_abandoned,
                abandonment_rate=summary.abandonment_rate,
                mean_rerouting_s=summary.mean_rerouting_s,
                mean_failed_total=summary.mean_failed_total,
                per_lot_failed_mean=dict(summary.per_lot_failed_mean),
                mean_drive_s=summary.mean_drive_s,
                mean_search_s=summary.mean_search_s,
                mean_walk_s=summary.mean_walk_s,
            ),
            runs=run_rows,
            convergence=conv,
            vehicles=vehicles,
            events=events,
        )

    @app.post("/compare", response_model=schemas.CompareResponse)
    def compare(req: schemas.CompareRequest) -> schemas.CompareResponse:
        s = _scenario_or_400(req.scenario)
        try:
            methods = [(label, resolve_method(label)) for label in req.methods]
        except ValueError as e:
            raise HTTPException(400, detail=str(e))
        try:
            rows, _ = compare_methods(
                s, methods, req.runs, req.seed, parallel=req.parallel
            )
        except ValueError as e:
            raise HTTPException(400, detail=str(e))
        except InfeasibleAssignmentError as e:
            raise HTTPException(409, detail=str(e))
        return schemas.CompareResponse(
            rows=[
                schemas.CompareRow(
                    method=r.label,
                    runs=r.n_runs,
                    mean_rerouting_min=r.mean_rerouting_min,
                    failed_search_total=r.failed_search_total,
                    abandonment_rate=r.abandonment_rate,
                    parked_fraction=r.parked_fraction,
                )
                for r in rows
            ]
        )

    return app
