"""Driver search strategies: four heterogeneous groups plus two simplified
stand-in baselines.

Groups 1-4 model guided drivers who see live lot states:

* Group 1 heads for the nearest lot from wherever it currently is.
* Group 2 does the same but demotes lots inside the exclusion radius of the
  destination, spreading load away from the core.
* Group 3 minimizes the walk from lot to destination.
* Group 4 minimizes drive + in-lot search + walk time.

The baselines are deliberately simplified stand-ins, not reproductions of
the systems they gesture at: ``NO_GUIDANCE_NEAREST`` drives to the nearest
lot with no availability information (fullness is discovered on arrival),
and ``MULTI_CRITERIA`` scores lots on normalized drive distance, walk
distance, and fullness (pricing dropped for lack of data).

Rankings are recomputed from the vehicle's current position after every
failed attempt; redirection is a fresh decision, not a frozen list.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .geo import PlanarCoord, manhattan_distance
from .lot_model import LotState, is_full, search_time
from .scenario import Scenario, ScenarioGeometry
from .stochastic import (
    actual_arrival,
    sample_arrival_noise,
    sample_expected_arrival,
    sample_patience,
)


class StrategyKind(str, enum.Enum):
    NEAREST_FROM_ENTRY = "nearest_from_entry"
    NEAREST_AVOIDING_CORE = "nearest_avoiding_core"
    MIN_WALK = "min_walk"
    MIN_TOTAL = "min_total"
    NO_GUIDANCE_NEAREST = "no_guidance_nearest"
    MULTI_CRITERIA = "multi_criteria"


GROUP_LABELS = {
    "G1": StrategyKind.NEAREST_FROM_ENTRY,
    "G2": StrategyKind.NEAREST_AVOIDING_CORE,
    "G3": StrategyKind.MIN_WALK,
    "G4": StrategyKind.MIN_TOTAL,
    "nearest": StrategyKind.NO_GUIDANCE_NEAREST,
    "multicriteria": StrategyKind.MULTI_CRITERIA,
}

# Weight order: drive distance, walk distance, fullness.
DEFAULT_MULTI_WEIGHTS = (0.5, 0.25, 0.25)

EQUAL_GROUP_MIX: Mapping[StrategyKind, float] = {
    StrategyKind.NEAREST_FROM_ENTRY: 0.25,
    StrategyKind.NEAREST_AVOIDING_CORE: 0.25,
    StrategyKind.MIN_WALK: 0.25,
    StrategyKind.MIN_TOTAL: 0.25,
}


def is_guided(kind: StrategyKind) -> bool:
    """Guided drivers see live lot states; unguided ones discover fullness
    only on arrival."""
    return kind is not StrategyKind.NO_GUIDANCE_NEAREST


@dataclass(frozen=True)
class Vehicle:
    id: str
    entry: str
    strategy: StrategyKind
    expected_arrival: float
    noise: float
    actual_arrival: float
    patience: float


def rank_lots(
    kind: StrategyKind,
    position: PlanarCoord,
    geom: ScenarioGeometry,
    states: Mapping[str, LotState],
    weights: Sequence[float] = DEFAULT_MULTI_WEIGHTS,
) -> list[str]:
    """Total preference order over all lots for a driver at `position`.

    Always a permutation of the scenario's lot ids; ties break by lot id.
    """
    kin = geom.scenario.kinematics

    if kind is StrategyKind.NEAREST_FROM_ENTRY or kind is StrategyKind.NO_GUIDANCE_NEAREST:
        keyed = [(geom.drive_dist(position, i), i) for i in geom.lot_ids]
    elif kind is StrategyKind.NEAREST_AVOIDING_CORE:
        keyed = [
            (i in geom.core_lots, geom.drive_dist(position, i), i) for i in geom.lot_ids
        ]
    elif kind is StrategyKind.MIN_WALK:
        keyed = [(geom.walk_dist[i], i) for i in geom.lot_ids]
    elif kind is StrategyKind.MIN_TOTAL:
        keyed = [
            (
                geom.drive_dist(position, i) / kin.cruise_speed
                + search_time(geom.lots_by_id[i], states[i], kin)
                + geom.walk_dist[i] / kin.walk_speed,
                i,
            )
            for i in geom.lot_ids
        ]
    elif kind is StrategyKind.MULTI_CRITERIA:
        w_drive, w_walk, w_full = _check_weights(weights)
        drive = {i: geom.drive_dist(position, i) for i in geom.lot_ids}
        max_drive = max(drive.values()) or 1.0
        max_walk = max(geom.walk_dist.values()) or 1.0
        keyed = [
            (
                w_drive * drive[i] / max_drive
                + w_walk * geom.walk_dist[i] / max_walk
                + w_full
                * (sum(states[i].per_floor_occupied) / geom.lots_by_id[i].capacity),
                i,
            )
            for i in geom.lot_ids
        ]
    else:
        raise ValueError(f"unknown strategy kind: {kind}")

    keyed.sort()
    return [entry[-1] for entry in keyed]


def _check_weights(weights: Sequence[float]) -> tuple[float, float, float]:
    if len(weights) != 3:
        raise ValueError("multi-criteria weights are (drive, walk, fullness)")
    if any(w < 0 for w in weights):
        raise ValueError("multi-criteria weights must be nonnegative")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError(f"multi-criteria weights must sum to 1, got {sum(weights)}")
    return float(weights[0]), float(weights[1]), float(weights[2])


def next_choice(
    kind: StrategyKind,
    visited: set[str],
    position: PlanarCoord,
    geom: ScenarioGeometry,
    states: Mapping[str, LotState],
    weights: Sequence[float] = DEFAULT_MULTI_WEIGHTS,
) -> Optional[str]:
    """First acceptable lot in the current ranking, or None when exhausted.

    Guided drivers skip lots that are full right now; unguided drivers only
    skip lots they have already seen full in person.
    """
    guided = is_guided(kind)
    for lot_id in rank_lots(kind, position, geom, states, weights):
        if lot_id in visited:
            continue
        if guided and is_full(states[lot_id], geom.lots_by_id[lot_id]):
            continue
        return lot_id
    return None


def assign_strategy_mix(
    vehicles: Sequence[Vehicle],
    mix: Mapping[StrategyKind, float],
    rng: np.random.Generator,
) -> list[Vehicle]:
    """Independently draw each vehicle's strategy from the mix.

    Weights are normalized, so {A: 1, B: 1} means an even split.
    """
    kinds = sorted(mix, key=lambda k: k.value)
    probs = np.array([mix[k] for k in kinds], dtype=float)
    if np.any(probs < 0):
        raise ValueError("mix weights must be nonnegative")
    if probs.sum() <= 0:
        raise ValueError("mix weights must have a positive sum")
    probs = probs / probs.sum()
    draws = rng.choice(len(kinds), size=len(vehicles), p=probs)
    return [replace(v, strategy=kinds[d]) for v, d in zip(vehicles, draws)]


def sample_vehicles(
    s: Scenario,
    rng: np.random.Generator,
    mix: Optional[Mapping[StrategyKind, float]] = None,
) -> list[Vehicle]:
    """Sample the fleet for one run: entry point, arrival times, patience,
    and (when a mix is given) strategy labels.

    Draw order is fixed so that runs with the same seed see the same fleet
    regardless of which method they then simulate: per-vehicle draws first,
    then one vectorized strategy draw.
    """
    entries = [e.id for e in s.entries]
    vehicles = []
    for k in range(s.demand):
        entry = entries[int(rng.integers(len(entries)))]
        et = sample_expected_arrival(rng, s.arrival, s.time_window)
        ns = sample_arrival_noise(rng, s.arrival)
        at = actual_arrival(et, ns, s.time_window)
        patience = sample_patience(rng, s.patience)
        vehicles.append(
            Vehicle(
                id=f"v{k + 1:05d}",
                entry=entry,
                strategy=StrategyKind.MIN_TOTAL,
                expected_arrival=et,
                noise=ns,
                actual_arrival=at,
                patience=patience,
            )
        )
    if mix is not None:
        vehicles = assign_strategy_mix(vehicles, mix, rng)
    return vehicles


def parse_mix(spec: str) -> dict[StrategyKind, float]:
    """Parse mix flags like ``G1=0.25,G2=0.25,G3=0.25,G4=0.25``."""
    mix: dict[StrategyKind, float] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        label, _, value = part.partition("=")
        label = label.strip()
        if label not in GROUP_LABELS:
            raise ValueError(
                f"unknown strategy label {label!r}; expected one of {sorted(GROUP_LABELS)}"
            )
        try:
            weight = float(value)
        except ValueError as exc:
            raise ValueError(f"bad weight for {label!r}: {value!r}") from exc
        mix[GROUP_LABELS[label]] = weight
    if not mix:
        raise ValueError(f"empty mix spec: {spec!r}")
    return mix
