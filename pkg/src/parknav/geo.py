"""Planar geometry for the study region.

Geographic coordinates are projected onto a flat plane with a Miller-style
cylindrical projection, after which all distances are Manhattan (the street
grid is assumed rectilinear). Projection constants follow the variant used
throughout this project:

    x' = lon
    y' = 1.25 * ln(tan(pi/4 + 0.4 * lat))
    L  = 6381372 * pi * 2
    x  = L/2 + (L / (2*pi)) * x'
    y  = L/4 - (L / (4*2.3)) * y'

Angles are radians (the tan/ln form is only coherent in radians). Note that
y *decreases* as latitude increases; distances are unaffected because they
use absolute differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Projected world width in meters. The 6381372 radius is kept verbatim even
# though it is not a standard Earth radius.
WORLD_WIDTH_M = 6381372 * math.pi * 2

_Y_STRETCH = 1.25
_LAT_SCALE = 0.4
_Y_DIVISOR = 2.3

# Invertible y' range corresponds to lat strictly inside +-pi/2.
_YP_MAX = _Y_STRETCH * math.log(math.tan(math.pi / 4 + _LAT_SCALE * (math.pi / 2)))
_YP_MIN = _Y_STRETCH * math.log(math.tan(math.pi / 4 - _LAT_SCALE * (math.pi / 2)))


@dataclass(frozen=True)
class GeoCoord:
    """Geographic position in radians.

    lat must lie strictly inside (-pi/2, pi/2); the projection diverges at
    the poles. lon must lie in [-pi, pi).
    """

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.lat) or not math.isfinite(self.lon):
            raise ValueError(f"non-finite coordinate: lat={self.lat}, lon={self.lon}")
        if not -math.pi / 2 < self.lat < math.pi / 2:
            raise ValueError(f"lat {self.lat} outside open interval (-pi/2, pi/2)")
        if not -math.pi <= self.lon < math.pi:
            raise ValueError(f"lon {self.lon} outside [-pi, pi)")


@dataclass(frozen=True)
class PlanarCoord:
    """Projected position in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.x) or not math.isfinite(self.y):
            raise ValueError(f"non-finite planar coordinate: x={self.x}, y={self.y}")


def miller_project(g: GeoCoord) -> PlanarCoord:
    """Project a geographic coordinate onto the plane, in meters."""
    x_prime = g.lon
    y_prime = _Y_STRETCH * math.log(math.tan(math.pi / 4 + _LAT_SCALE * g.lat))
    x = WORLD_WIDTH_M / 2 + WORLD_WIDTH_M / (2 * math.pi) * x_prime
    y = WORLD_WIDTH_M / 4 - WORLD_WIDTH_M / (4 * _Y_DIVISOR) * y_prime
    return PlanarCoord(x, y)


def miller_unproject(p: PlanarCoord) -> GeoCoord:
    """Invert :func:`miller_project`.

    Raises ValueError if the point lies outside the projected range of
    valid geographic coordinates.
    """
    x_prime = (p.x - WORLD_WIDTH_M / 2) * (2 * math.pi / WORLD_WIDTH_M)
    y_prime = (WORLD_WIDTH_M / 4 - p.y) * (4 * _Y_DIVISOR / WORLD_WIDTH_M)
    if not -math.pi <= x_prime < math.pi:
        raise ValueError(f"x={p.x} maps to lon {x_prime} outside [-pi, pi)")
    if not _YP_MIN < y_prime < _YP_MAX:
        raise ValueError(f"y={p.y} outside the invertible projected range")
    lat = (math.atan(math.exp(y_prime / _Y_STRETCH)) - math.pi / 4) / _LAT_SCALE
    return GeoCoord(lat, x_prime)


def manhattan_distance(a: PlanarCoord, b: PlanarCoord) -> float:
    """L1 distance in meters on the projected plane."""
    return abs(a.x - b.x) + abs(a.y - b.y)


def travel_time(distance: float, speed: float) -> float:
    """Seconds to cover `distance` meters at constant `speed` m/s."""
    if speed <= 0:
        raise ValueError(f"speed must be positive, got {speed}")
    if distance < 0:
        raise ValueError(f"distance must be nonnegative, got {distance}")
    return distance / speed
