"""Mutable per-lot occupancy state and the in-lot search-time model.

The search-time estimate for a lot with capacity ``Vol``, occupancy fraction
``O``, ``N`` floors, top-floor capacity ``C_N`` at occupancy ``O_N``, ramp
length ``R`` and spot width ``W`` is

    TS = W*Vol*O/(2*v_c) + W*Vol*O/(2*v_w) + t_stop
         + (N - 1) * (R/v_ud * C_N * O_N + t_turn)

implemented verbatim. The ramp term has units of seconds*vehicles rather
than seconds; it is kept as written rather than "corrected". The top floor
supplies C_N and O_N, reading the (N - 1) multiplier as the cost of
climbing to floor N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .scenario import KinematicParams, ParkingLot


@dataclass
class LotState:
    """Occupancy of one lot during a single simulation run.

    Owned by exactly one run; mutation is event-ordered and single-threaded.
    """

    lot_id: str
    per_floor_occupied: list[int]
    failed_search_count: int = 0


def new_state(lot: ParkingLot) -> LotState:
    return LotState(lot_id=lot.id, per_floor_occupied=[0] * lot.floors)


def occupied_total(state: LotState) -> int:
    return sum(state.per_floor_occupied)


def occupancy(state: LotState, lot: ParkingLot) -> float:
    """Occupied fraction of the whole lot, in [0, 1]."""
    return occupied_total(state) / lot.capacity


def is_full(state: LotState, lot: ParkingLot) -> bool:
    return occupied_total(state) >= lot.capacity


def search_time_at(
    lot: ParkingLot,
    kin: KinematicParams,
    occ: float,
    top_occ: float | None = None,
) -> float:
    """Search time at a given occupancy fraction (planning-time estimate).

    ``top_occ`` defaults to the overall occupancy; it only matters for
    multi-floor lots.
    """
    if top_occ is None:
        top_occ = occ
    cruise_and_walk = (
        kin.spot_width * lot.capacity * occ / (2 * kin.cruise_speed)
        + kin.spot_width * lot.capacity * occ / (2 * kin.walk_speed)
        + kin.stop_time
    )
    if lot.floors == 1:
        return cruise_and_walk
    top_capacity = lot.floor_capacities[-1]
    ramp = lot.ramp_length / kin.ramp_speed * top_capacity * top_occ + kin.turn_time
    return cruise_and_walk + (lot.floors - 1) * ramp


def search_time(lot: ParkingLot, state: LotState, kin: KinematicParams) -> float:
    """Search time at the lot's current live occupancy."""
    occ = occupancy(state, lot)
    top_occ = state.per_floor_occupied[-1] / lot.floor_capacities[-1]
    return search_time_at(lot, kin, occ, top_occ)


def try_admit(state: LotState, lot: ParkingLot) -> int | None:
    """Claim a spot on the lowest non-full floor.

    Returns the floor index, or None when the lot is full (in which case the
    failed-search counter is incremented). Vehicles fill lower floors first,
    matching sequential single-entry filling.
    """
    for floor, (used, cap) in enumerate(zip(state.per_floor_occupied, lot.floor_capacities)):
        if used < cap:
            state.per_floor_occupied[floor] = used + 1
            return floor
    state.failed_search_count += 1
    return None
