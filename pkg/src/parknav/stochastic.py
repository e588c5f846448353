"""Seeded random sampling for arrivals and driver patience.

All samplers take an explicit ``numpy.random.Generator`` so that a run is
fully determined by its seed: identical seeds yield bit-identical sample
streams. Simulation replications each own an independent generator seeded
as ``base_seed + replication_index``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ArrivalParams:
    """Expected arrivals follow a Poisson draw over time-window segments,
    jittered by zero-mean normal noise (seconds)."""

    lambda_segment: float
    noise_sigma: float

    def __post_init__(self) -> None:
        if self.lambda_segment <= 0:
            raise ValueError(f"lambda_segment must be > 0, got {self.lambda_segment}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


@dataclass(frozen=True)
class PatienceParams:
    """Gamma-distributed limit on cumulative search time before a driver
    gives up and leaves the region."""

    shape: float
    scale: float

    def __post_init__(self) -> None:
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError(
                f"patience shape and scale must be > 0, got shape={self.shape}, scale={self.scale}"
            )


@dataclass(frozen=True)
class TimeWindow:
    """Arrival window [start, end] seconds, split into equal segments."""

    start: float
    end: float
    segment: float

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise ValueError(f"window end {self.end} must exceed start {self.start}")
        if self.segment <= 0:
            raise ValueError(f"segment length must be > 0, got {self.segment}")
        n = (self.end - self.start) / self.segment
        if abs(n - round(n)) > 1e-9:
            raise ValueError(
                f"segment length {self.segment} does not divide window span {self.end - self.start}"
            )

    @property
    def n_segments(self) -> int:
        return int(round((self.end - self.start) / self.segment))


def sample_expected_arrival(rng: np.random.Generator, p: ArrivalParams, window: TimeWindow) -> float:
    """Draw an expected arrival time within the window.

    The segment index follows a Poisson(lambda_segment) distribution
    truncated (renormalized) to [0, n_segments - 1]; the position within the
    segment is uniform. Truncation is done by inverse CDF on the
    renormalized pmf, so no draws are ever rejected.
    """
    n = window.n_segments
    # pmf of Poisson(lambda) over segments 0..n-1, built iteratively.
    pmf = np.empty(n)
    pmf[0] = math.exp(-p.lambda_segment)
    for s in range(1, n):
        pmf[s] = pmf[s - 1] * p.lambda_segment / s
    cdf = np.cumsum(pmf)
    u = rng.random() * cdf[-1]
    segment = int(np.searchsorted(cdf, u, side="right"))
    segment = min(segment, n - 1)
    return window.start + (segment + rng.random()) * window.segment


def sample_arrival_noise(rng: np.random.Generator, p: ArrivalParams) -> float:
    """Zero-mean normal jitter in seconds; exactly 0 when sigma is 0."""
    if p.noise_sigma == 0:
        return 0.0
    return float(rng.normal(0.0, p.noise_sigma))


def actual_arrival(et: float, ns: float, window: TimeWindow) -> float:
    """Expected time plus noise, clamped so nothing arrives before the
    window opens."""
    return max(window.start, et + ns)


def sample_patience(rng: np.random.Generator, p: PatienceParams) -> float:
    """Draw a strictly positive patience threshold in seconds."""
    return float(rng.gamma(p.shape, p.scale))


def should_abandon(elapsed_search: float, patience: float) -> bool:
    """True once cumulative search time exceeds the driver's patience."""
    if elapsed_search < 0:
        raise ValueError(f"elapsed_search must be >= 0, got {elapsed_search}")
    return elapsed_search > patience
