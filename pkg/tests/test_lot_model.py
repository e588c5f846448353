import numpy as np
import pytest

from parknav.lot_model import (
    is_full,
    new_state,
    occupancy,
    occupied_total,
    search_time,
    search_time_at,
    try_admit,
)
from parknav.scenario import KinematicParams

from conftest import lot_at

KIN = KinematicParams(
    spot_width=2.5, cruise_speed=2.78, walk_speed=1.2, ramp_speed=2.78,
    stop_time=30.0, turn_time=10.0,
)

# Arbitrary-precision evaluations of the search-time expression.
TS_HALF_FULL_100 = 104.56534772182255   # W=2.5, Vol=100, O=0.5, N=1
RAMP_TERM = 225.8273381294964           # (30/2.78)*50*0.4 + 10
TS_TWO_FLOOR = 330.39268585131896


class TestSearchTimeFormula:
    def test_empty_single_floor_is_stop_time_exactly(self):
        lot = lot_at("a", 0.0, 0.0, capacity=100)
        assert search_time_at(lot, KIN, occ=0.0) == 30.0

    def test_half_full_worked_value(self):
        lot = lot_at("a", 0.0, 0.0, capacity=100)
        assert search_time_at(lot, KIN, occ=0.5) == pytest.approx(TS_HALF_FULL_100, rel=1e-9)

    def test_two_floor_ramp_term(self):
        lot = lot_at(
            "b", 0.0, 0.0, capacity=100, floors=2,
            floor_capacities=(50, 50), ramp_length=30.0,
        )
        got = search_time_at(lot, KIN, occ=0.5, top_occ=0.4)
        assert got == pytest.approx(TS_TWO_FLOOR, rel=1e-9)
        assert got - TS_HALF_FULL_100 == pytest.approx(RAMP_TERM, rel=1e-9)

    def test_monotone_in_occupancies(self):
        # Raising either occupancy never lowers the estimate.
        rng = np.random.default_rng(17)
        for _ in range(1000):
            cap = int(rng.integers(2, 400))
            top = int(rng.integers(1, cap))
            lot = lot_at(
                "m", 0.0, 0.0, capacity=cap, floors=2,
                floor_capacities=(cap - top, top), ramp_length=float(rng.uniform(5, 60)),
            )
            o1, o2 = sorted(rng.uniform(0, 1, size=2))
            t1, t2 = sorted(rng.uniform(0, 1, size=2))
            assert search_time_at(lot, KIN, o1, t1) <= search_time_at(lot, KIN, o2, t1)
            assert search_time_at(lot, KIN, o1, t1) <= search_time_at(lot, KIN, o1, t2)

    def test_live_state_uses_top_floor_occupancy(self):
        lot = lot_at(
            "c", 0.0, 0.0, capacity=100, floors=2,
            floor_capacities=(50, 50), ramp_length=30.0,
        )
        st = new_state(lot)
        st.per_floor_occupied[0] = 30
        st.per_floor_occupied[1] = 20
        expect = search_time_at(lot, KIN, occ=0.5, top_occ=0.4)
        assert search_time(lot, st, KIN) == pytest.approx(expect)


class TestOccupancy:
    def test_empty_zero_full_one(self):
        lot = lot_at("a", 0.0, 0.0, capacity=40)
        st = new_state(lot)
        assert occupancy(st, lot) == 0.0
        st.per_floor_occupied[0] = 40
        assert occupancy(st, lot) == 1.0

    def test_half(self):
        lot = lot_at("a", 0.0, 0.0, capacity=40)
        st = new_state(lot)
        st.per_floor_occupied[0] = 20
        assert occupancy(st, lot) == 0.5


class TestTryAdmit:
    def test_fills_lowest_floor_first(self):
        lot = lot_at(
            "a", 0.0, 0.0, capacity=3, floors=2, floor_capacities=(2, 1)
        )
        st = new_state(lot)
        assert try_admit(st, lot) == 0
        assert try_admit(st, lot) == 0
        assert try_admit(st, lot) == 1
        assert st.per_floor_occupied == [2, 1]

    def test_full_lot_counts_failed_search(self):
        lot = lot_at("a", 0.0, 0.0, capacity=1)
        st = new_state(lot)
        assert try_admit(st, lot) == 0
        assert is_full(st, lot)
        assert try_admit(st, lot) is None
        assert try_admit(st, lot) is None
        assert st.failed_search_count == 2
        assert occupied_total(st) == 1

    def test_never_exceeds_capacity(self):
        lot = lot_at("a", 0.0, 0.0, capacity=5, floors=2, floor_capacities=(3, 2))
        st = new_state(lot)
        for _ in range(20):
            try_admit(st, lot)
        assert occupied_total(st) == 5
        assert all(
            used <= cap for used, cap in zip(st.per_floor_occupied, lot.floor_capacities)
        )
