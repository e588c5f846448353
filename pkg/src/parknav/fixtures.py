"""Shipped example scenarios.

Two generated worlds are packaged as data files so experiments and docs
have a stable reference point:

* ``berkeley_synth``: full-scale grid around a downtown destination,
  21 lots totalling 3992 spaces and 12 entry points.
* ``berkeley_desk``: the same shape scaled down to 420 spaces with demand
  equal to supply; small enough for fast runs and CI.

Both were produced by `synth_scenario` with pinned seeds and committed;
loading them does not re-run the generator.
"""

from __future__ import annotations

from importlib.resources import files

from .scenario import Scenario, load_scenario

SYNTH_FIXTURE = "berkeley_synth"
DESK_FIXTURE = "berkeley_desk"
FIXTURE_NAMES = (SYNTH_FIXTURE, DESK_FIXTURE)

# Seeds the committed files were generated with; kept for regeneration.
FIXTURE_SEEDS = {SYNTH_FIXTURE: 7, DESK_FIXTURE: 11}


def fixture_text(name: str) -> str:
    if name not in FIXTURE_NAMES:
        raise ValueError(f"unknown fixture {name!r}; expected one of {FIXTURE_NAMES}")
    return (files("parknav") / "data" / f"{name}.yaml").read_text(encoding="utf-8")


def load_fixture(name: str) -> Scenario:
    return load_scenario(fixture_text(name))


def synth_fixture() -> Scenario:
    return load_fixture(SYNTH_FIXTURE)


def desk_fixture() -> Scenario:
    return load_fixture(DESK_FIXTURE)
