import math

import pytest

from parknav.fixtures import desk_fixture
from parknav.geo import GeoCoord
from parknav.scenario import (
    DEFAULT_ARRIVAL,
    DEFAULT_KINEMATICS,
    DEFAULT_PATIENCE,
    DEFAULT_TIME_WINDOW,
    EntryPoint,
    ParkingLot,
    Region,
    Scenario,
    synth_scenario,
)


@pytest.fixture(scope="session")
def desk() -> Scenario:
    return desk_fixture()


@pytest.fixture(scope="session")
def tiny() -> Scenario:
    # 4 lots / 40 spaces / 2 entries; small enough for exhaustive checks.
    return synth_scenario(seed=2, n_lots=4, total_capacity=40, n_entries=2)


def build_scenario(
    lots: list[ParkingLot],
    entries: list[EntryPoint],
    demand: int,
    *,
    destination: GeoCoord = None,
    exclusion_radius: float = 0.0,
    allow_overflow: bool = False,
) -> Scenario:
    """Hand-built world on a small patch near the equator, where degrees
    are near-linear in projected meters and distances are easy to reason
    about."""
    region = Region(
        min_lat=math.radians(-0.5),
        min_lon=math.radians(-0.5),
        max_lat=math.radians(0.5),
        max_lon=math.radians(0.5),
    )
    return Scenario(
        destination=destination or GeoCoord(0.0, 0.0),
        region=region,
        lots=tuple(lots),
        entries=tuple(entries),
        demand=demand,
        kinematics=DEFAULT_KINEMATICS,
        arrival=DEFAULT_ARRIVAL,
        patience=DEFAULT_PATIENCE,
        exclusion_radius=exclusion_radius,
        time_window=DEFAULT_TIME_WINDOW,
        allow_overflow=allow_overflow,
    )


def lot_at(
    lot_id: str,
    lat_deg: float,
    lon_deg: float,
    capacity: int = 10,
    floors: int = 1,
    floor_capacities: tuple = None,
    ramp_length: float = 0.0,
) -> ParkingLot:
    return ParkingLot(
        id=lot_id,
        location=GeoCoord(math.radians(lat_deg), math.radians(lon_deg)),
        capacity=capacity,
        floors=floors,
        floor_capacities=floor_capacities or (capacity,),
        ramp_length=ramp_length,
    )


def entry_at(entry_id: str, lat_deg: float, lon_deg: float) -> EntryPoint:
    return EntryPoint(id=entry_id, location=GeoCoord(math.radians(lat_deg), math.radians(lon_deg)))
