"""Vehicle-to-lot assignment: cost matrix construction and exact solving.

The planner minimizes, over all feasible assignments, the summed per-vehicle
cost drive-time + in-lot search-time + walk-time. With unit-demand vehicles
and capacitated lots this is a transportation problem whose LP relaxation is
integral, so an exact combinatorial method suffices: costs are scaled to
integer milliseconds (avoiding float tie instability) and each lot is
expanded into capacity-many unit columns, turning the problem into a
rectangular linear-sum assignment solved by scipy. A small brute-force
enumerator serves as an independent optimality oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geo import manhattan_distance, travel_time
from .lot_model import search_time_at
from .scenario import Scenario, ScenarioGeometry
from .strategies import Vehicle

COST_SCALE_MS = 1000

AssignMode = Literal["exact_fill", "at_most", "auto"]


class InfeasibleAssignmentError(ValueError):
    """Demand cannot be placed within the stated capacities."""


@dataclass(frozen=True)
class CostMatrix:
    """Dense vehicle x lot costs in seconds, with the drive/search/walk
    breakdown retained for reporting."""

    vehicle_ids: tuple[str, ...]
    lot_ids: tuple[str, ...]
    drive_s: np.ndarray
    search_s: np.ndarray
    walk_s: np.ndarray

    @property
    def costs(self) -> np.ndarray:
        return self.drive_s + self.search_s + self.walk_s

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.vehicle_ids), len(self.lot_ids))


@dataclass(frozen=True)
class Assignment:
    """One lot per vehicle plus the summed cost of the mapping."""

    lot_of: Mapping[str, str]
    total_cost: float


def scale_costs_ms(costs: np.ndarray) -> np.ndarray:
    """Integer-millisecond view of a cost matrix (the solver currency)."""
    return np.rint(np.asarray(costs, dtype=float) * COST_SCALE_MS).astype(np.int64)


def build_cost_matrix(
    s: Scenario,
    vehicles: Sequence[Vehicle],
    planning_occupancy: Optional[float] = None,
    geometry: Optional[ScenarioGeometry] = None,
) -> CostMatrix:
    """Cost of sending each vehicle to each lot.

    Live occupancy is unknown at planning time, so the search-time term uses
    a constant planning occupancy, by default demand / total capacity
    (uniform expected fill). Driving runs at cruise speed from the vehicle's
    entry point; walking runs from the lot to the destination.
    """
    geom = geometry or ScenarioGeometry(s)
    kin = s.kinematics
    if planning_occupancy is None:
        planning_occupancy = min(1.0, s.demand / s.total_capacity)
    if not 0.0 <= planning_occupancy <= 1.0:
        raise ValueError(f"planning_occupancy must be in [0, 1], got {planning_occupancy}")

    lot_ids = tuple(geom.lot_ids)
    search_row = np.array(
        [search_time_at(geom.lots_by_id[i], kin, planning_occupancy) for i in lot_ids]
    )
    walk_row = np.array([travel_time(geom.walk_dist[i], kin.walk_speed) for i in lot_ids])

    k = len(vehicles)
    drive = np.empty((k, len(lot_ids)))
    for row, v in enumerate(vehicles):
        pos = geom.entry_pos[v.entry]
        for col, lot_id in enumerate(lot_ids):
            drive[row, col] = travel_time(
                manhattan_distance(pos, geom.lot_pos[lot_id]), kin.cruise_speed
            )

    return CostMatrix(
        vehicle_ids=tuple(v.id for v in vehicles),
        lot_ids=lot_ids,
        drive_s=drive,
        search_s=np.tile(search_row, (k, 1)),
        walk_s=np.tile(walk_row, (k, 1)),
    )


def _check_feasible(k: int, capacities: Sequence[int], mode: str) -> str:
    total = sum(capacities)
    if any(c < 0 for c in capacities):
        raise ValueError("capacities must be nonnegative")
    if mode == "auto":
        mode = "exact_fill" if k == total else "at_most"
    if mode == "exact_fill" and k != total:
        raise InfeasibleAssignmentError(
            f"exact_fill requires demand == total capacity, got K={k} vs {total}"
        )
    if k > total:
        raise InfeasibleAssignmentError(f"demand K={k} exceeds total capacity {total}")
    return mode


def solve_assignment(c: CostMatrix, capacities: Sequence[int], mode: AssignMode = "at_most") -> Assignment:
    """Provably optimal assignment under the given capacity bounds.

    exact_fill requires K == sum(capacities) and fills every lot exactly;
    at_most requires K <= sum(capacities). Optimality is exact in integer
    milliseconds; the reported total is the float cost along the chosen
    mapping.
    """
    k, m = c.shape
    if len(capacities) != m:
        raise ValueError(f"got {len(capacities)} capacities for {m} lots")
    _check_feasible(k, capacities, mode)

    scaled = scale_costs_ms(c.costs)
    # One column per parking space, ordered by (lot index, space index) so
    # ties resolve deterministically.
    col_lot = np.repeat(np.arange(m), capacities)
    expanded = scaled[:, col_lot]
    row_ind, col_ind = linear_sum_assignment(expanded)

    lot_index = {}
    for row, col in zip(row_ind, col_ind):
        lot_index[int(row)] = int(col_lot[col])
    costs = c.costs
    lot_of = {c.vehicle_ids[row]: c.lot_ids[lot] for row, lot in sorted(lot_index.items())}
    total = float(sum(costs[row, lot] for row, lot in lot_index.items()))
    return Assignment(lot_of=lot_of, total_cost=total)


BRUTE_FORCE_MAX_VEHICLES = 10
BRUTE_FORCE_MAX_SPACES = 12


def brute_force_assignment(c: CostMatrix, capacities: Sequence[int]) -> Assignment:
    """Exhaustive optimality oracle for small instances.

    Enumerates every feasible assignment in lexicographic order of the
    lot-index sequence with branch-and-bound pruning, so among cost ties the
    lexicographically smallest mapping wins. Guarded to K <= 10 vehicles and
    at most 12 total spaces.
    """
    k, m = c.shape
    if len(capacities) != m:
        raise ValueError(f"got {len(capacities)} capacities for {m} lots")
    if k > BRUTE_FORCE_MAX_VEHICLES or sum(capacities) > BRUTE_FORCE_MAX_SPACES:
        raise ValueError(
            f"instance too large for brute force: K={k} (max {BRUTE_FORCE_MAX_VEHICLES}), "
            f"spaces={sum(capacities)} (max {BRUTE_FORCE_MAX_SPACES})"
        )
    _check_feasible(k, capacities, "at_most")

    scaled = scale_costs_ms(c.costs)
    remaining = list(capacities)
    choice = [0] * k
    best_total: Optional[int] = None
    best_choice: Optional[list[int]] = None

    def descend(vehicle: int, partial: int) -> None:
        nonlocal best_total, best_choice
        if best_total is not None and partial >= best_total:
            return
        if vehicle == k:
            best_total = partial
            best_choice = choice.copy()
            return
        for lot in range(m):
            if remaining[lot] == 0:
                continue
            remaining[lot] -= 1
            choice[vehicle] = lot
            descend(vehicle + 1, partial + int(scaled[vehicle, lot]))
            remaining[lot] += 1

    descend(0, 0)
    assert best_choice is not None
    costs = c.costs
    lot_of = {c.vehicle_ids[i]: c.lot_ids[lot] for i, lot in enumerate(best_choice)}
    total = float(sum(costs[i, lot] for i, lot in enumerate(best_choice)))
    return Assignment(lot_of=lot_of, total_cost=total)


def assignment_cost(a: Assignment, c: CostMatrix) -> float:
    """Recompute the summed cost of a mapping against a cost matrix."""
    row_of = {vid: i for i, vid in enumerate(c.vehicle_ids)}
    col_of = {lid: j for j, lid in enumerate(c.lot_ids)}
    costs = c.costs
    total = 0.0
    for vid, lid in a.lot_of.items():
        if vid not in row_of:
            raise ValueError(f"vehicle {vid} not present in cost matrix")
        if lid not in col_of:
            raise ValueError(f"lot {lid} not present in cost matrix")
        total += float(costs[row_of[vid], col_of[lid]])
    return total


def assignment_counts(a: Assignment) -> dict[str, int]:
    """Vehicles assigned per lot."""
    counts: dict[str, int] = {}
    for lot_id in a.lot_of.values():
        counts[lot_id] = counts.get(lot_id, 0) + 1
    return counts
