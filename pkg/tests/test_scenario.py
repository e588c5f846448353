import math

import pytest

from parknav.fixtures import desk_fixture, synth_fixture
from parknav.geo import GeoCoord, manhattan_distance, miller_project
from parknav.scenario import (
    ScenarioGeometry,
    ScenarioParseError,
    ScenarioValidationError,
    dump_scenario,
    load_scenario,
    scenario_from_doc,
    scenario_to_doc,
    synth_scenario,
    validate_scenario,
    with_demand,
)

from conftest import build_scenario, entry_at, lot_at


class TestSynthGenerator:
    def test_deterministic_in_seed(self):
        a = synth_scenario(seed=2, n_lots=4, total_capacity=40, n_entries=2)
        b = synth_scenario(seed=2, n_lots=4, total_capacity=40, n_entries=2)
        assert a == b

    def test_different_seeds_differ(self):
        a = synth_scenario(seed=2, n_lots=4, total_capacity=40, n_entries=2)
        b = synth_scenario(seed=3, n_lots=4, total_capacity=40, n_entries=2)
        assert a != b

    def test_small_scenario_is_valid(self, tiny):
        assert validate_scenario(tiny) == []
        assert tiny.total_capacity == 40
        assert len(tiny.lots) == 4
        assert len(tiny.entries) == 2

    def test_demand_defaults_to_supply(self, tiny):
        assert tiny.demand == tiny.total_capacity

    def test_capacity_partition_exact(self):
        s = synth_scenario(seed=9, n_lots=7, total_capacity=123, n_entries=3)
        assert sum(lot.capacity for lot in s.lots) == 123
        assert all(lot.capacity >= 1 for lot in s.lots)

    def test_floor_capacities_sum_to_capacity(self):
        s = synth_scenario(seed=9, n_lots=7, total_capacity=123, n_entries=3)
        for lot in s.lots:
            assert sum(lot.floor_capacities) == lot.capacity
            assert len(lot.floor_capacities) == lot.floors
            assert 1 <= lot.floors <= 3

    def test_entries_on_region_boundary(self):
        s = synth_scenario(seed=4, n_lots=3, total_capacity=30, n_entries=5)
        r = s.region
        for e in s.entries:
            on_lat_edge = math.isclose(e.location.lat, r.min_lat) or math.isclose(
                e.location.lat, r.max_lat
            )
            on_lon_edge = math.isclose(e.location.lon, r.min_lon) or math.isclose(
                e.location.lon, r.max_lon
            )
            assert on_lat_edge or on_lon_edge

    def test_rejects_capacity_below_lot_count(self):
        with pytest.raises(ValueError):
            synth_scenario(seed=1, n_lots=10, total_capacity=5, n_entries=1)


class TestShippedFixtures:
    def test_synth_fixture_shape(self):
        s = synth_fixture()
        assert len(s.lots) == 21
        assert s.total_capacity == 3992
        assert len(s.entries) == 12
        assert validate_scenario(s) == []

    def test_desk_fixture_shape(self):
        s = desk_fixture()
        assert len(s.lots) == 21
        assert s.total_capacity == 420
        assert len(s.entries) == 12
        assert s.demand == s.total_capacity
        assert validate_scenario(s) == []


class TestValidation:
    def test_demand_over_capacity_is_violation(self, tiny):
        s = with_demand(tiny, tiny.total_capacity + 1)
        violations = validate_scenario(s)
        assert len(violations) == 1
        assert "demand" in violations[0]

    def test_overflow_flag_permits_excess_demand(self, tiny):
        s = with_demand(tiny, tiny.total_capacity + 1, allow_overflow=True)
        assert validate_scenario(s) == []

    def test_duplicate_lot_ids_reported(self):
        lots = [lot_at("a", 0.1, 0.1), lot_at("a", 0.2, 0.2)]
        s = build_scenario(lots, [entry_at("e", 0.0, 0.3)], demand=5)
        assert any("duplicate" in v and "a" in v for v in validate_scenario(s))

    def test_lot_outside_region_reported(self):
        lots = [lot_at("a", 2.0, 0.0)]  # region spans +-0.5 degrees
        s = build_scenario(lots, [entry_at("e", 0.0, 0.3)], demand=5)
        assert any("region" in v for v in validate_scenario(s))

    def test_floor_capacity_mismatch_reported(self):
        bad = lot_at("a", 0.1, 0.1, capacity=10, floors=2, floor_capacities=(4, 4))
        s = build_scenario([bad], [entry_at("e", 0.0, 0.3)], demand=5)
        assert any("floor" in v and "a" in v for v in validate_scenario(s))

    def test_all_violations_enumerated(self):
        bad_floor = lot_at("a", 0.1, 0.1, capacity=10, floors=2, floor_capacities=(4, 4))
        outside = lot_at("b", 2.0, 0.0)
        s = build_scenario([bad_floor, outside], [entry_at("e", 0.0, 0.3)], demand=100)
        assert len(validate_scenario(s)) >= 3


class TestDocumentRoundTrip:
    def test_yaml_round_trip(self, tiny):
        text = dump_scenario(tiny)
        back = load_scenario(text)
        assert [lot.id for lot in back.lots] == [lot.id for lot in tiny.lots]
        assert back.demand == tiny.demand
        for a, b in zip(back.lots, tiny.lots):
            # One degrees<->radians round trip costs at most ~1 ulp.
            assert a.location.lat == pytest.approx(b.location.lat, abs=1e-12)
            assert a.location.lon == pytest.approx(b.location.lon, abs=1e-12)
            assert a.capacity == b.capacity
            assert a.floor_capacities == b.floor_capacities

    def test_doc_round_trip_preserves_counts(self, desk):
        doc = scenario_to_doc(desk)
        back = scenario_from_doc(doc)
        assert len(back.lots) == len(desk.lots)
        assert back.total_capacity == desk.total_capacity

    def test_angles_in_files_are_degrees(self, tiny):
        doc = scenario_to_doc(tiny)
        # Radian values are all < pi; the region spans tens of degrees.
        assert abs(doc.destination.lat) > 10 or abs(doc.destination.lon) > 10

    def test_parse_error_carries_location(self):
        with pytest.raises(ScenarioParseError) as err:
            load_scenario("destination: {lat: 1, lon: [unclosed")
        assert "line" in str(err.value)

    def test_schema_violation_lists_field(self):
        with pytest.raises(ScenarioValidationError) as err:
            load_scenario("destination: {lat: 37.9, lon: -122.3}\n")
        assert err.value.violations

    def test_invalid_demand_rejected_at_load(self, tiny):
        doc = scenario_to_doc(tiny)
        data = doc.model_dump()
        data["demand_K"] = 10_000
        with pytest.raises(ScenarioValidationError) as err:
            scenario_from_doc(type(doc)(**data))
        assert any("demand" in v for v in err.value.violations)


class TestGeometry:
    def test_walk_distances_match_projection(self, tiny):
        geom = ScenarioGeometry(tiny)
        dest = miller_project(tiny.destination)
        for lot in tiny.lots:
            d = manhattan_distance(miller_project(lot.location), dest)
            assert geom.walk_dist[lot.id] == pytest.approx(d)

    def test_core_lots_strictly_inside_radius(self):
        near = lot_at("near", 0.0001, 0.0)  # ~8 m from the destination
        far = lot_at("far", 0.4, 0.0)  # ~30 km
        s = build_scenario(
            [near, far], [entry_at("e", 0.0, 0.3)], demand=5, exclusion_radius=1000.0
        )
        geom = ScenarioGeometry(s)
        assert "near" in geom.core_lots
        assert "far" not in geom.core_lots

    def test_zero_radius_excludes_nothing(self):
        at_dest = lot_at("x", 0.0, 0.0)
        s = build_scenario([at_dest], [entry_at("e", 0.0, 0.3)], demand=1)
        geom = ScenarioGeometry(s)
        assert geom.core_lots == frozenset()

    def test_lot_order_follows_file_order(self, desk):
        geom = ScenarioGeometry(desk)
        assert geom.lot_ids == tuple(lot.id for lot in desk.lots)
