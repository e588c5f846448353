import math

import numpy as np
import pytest

from parknav.stochastic import (
    ArrivalParams,
    PatienceParams,
    TimeWindow,
    actual_arrival,
    sample_arrival_noise,
    sample_expected_arrival,
    sample_patience,
    should_abandon,
)

WINDOW = TimeWindow(start=36000.0, end=43200.0, segment=600.0)

# Exact mean segment index of Poisson(6) truncated to 0..11, from summing
# the renormalized pmf with 50-digit arithmetic.
TRUNC_MEAN_SEGMENT = 5.862054646733167


class TestTimeWindow:
    def test_segment_count(self):
        assert WINDOW.n_segments == 12

    def test_rejects_nondividing_segment(self):
        with pytest.raises(ValueError):
            TimeWindow(start=0.0, end=100.0, segment=7.0)

    def test_rejects_empty_window(self):
        with pytest.raises(ValueError):
            TimeWindow(start=10.0, end=10.0, segment=1.0)


class TestExpectedArrival:
    def test_within_window(self):
        rng = np.random.default_rng(0)
        params = ArrivalParams(lambda_segment=6.0, noise_sigma=120.0)
        for _ in range(1000):
            et = sample_expected_arrival(rng, params, WINDOW)
            assert WINDOW.start <= et < WINDOW.end

    def test_deterministic_in_seed(self):
        params = ArrivalParams(lambda_segment=6.0, noise_sigma=0.0)
        a = [sample_expected_arrival(np.random.default_rng(5), params, WINDOW) for _ in range(3)]
        b = [sample_expected_arrival(np.random.default_rng(5), params, WINDOW) for _ in range(3)]
        assert a == b

    def test_truncated_poisson_segment_mean(self):
        # Segment index mean vs the exact truncated-pmf mean, 2% tolerance.
        rng = np.random.default_rng(42)
        params = ArrivalParams(lambda_segment=6.0, noise_sigma=0.0)
        n = 100_000
        seg = np.empty(n)
        for i in range(n):
            et = sample_expected_arrival(rng, params, WINDOW)
            seg[i] = (et - WINDOW.start) // WINDOW.segment
        assert seg.mean() == pytest.approx(TRUNC_MEAN_SEGMENT, rel=0.02)

    def test_all_segments_reachable_with_high_lambda(self):
        rng = np.random.default_rng(1)
        params = ArrivalParams(lambda_segment=6.0, noise_sigma=0.0)
        seen = set()
        for _ in range(20000):
            et = sample_expected_arrival(rng, params, WINDOW)
            seen.add(int((et - WINDOW.start) // WINDOW.segment))
        assert seen == set(range(12))


class TestArrivalNoise:
    def test_zero_sigma_is_exact_zero(self):
        rng = np.random.default_rng(3)
        assert sample_arrival_noise(rng, ArrivalParams(6.0, 0.0)) == 0.0

    def test_noise_sample_mean(self):
        rng = np.random.default_rng(3)
        params = ArrivalParams(6.0, 120.0)
        xs = np.array([sample_arrival_noise(rng, params) for _ in range(50000)])
        assert abs(xs.mean()) < 2.0
        assert xs.std() == pytest.approx(120.0, rel=0.05)


class TestActualArrival:
    def test_sum(self):
        assert actual_arrival(36500.0, 30.0, WINDOW) == 36530.0

    def test_clamped_to_window_start(self):
        # Negative noise cannot push a vehicle before the window opens.
        assert actual_arrival(36010.0, -500.0, WINDOW) == 36000.0


class TestPatience:
    def test_gamma_mean(self):
        rng = np.random.default_rng(7)
        params = PatienceParams(shape=2.0, scale=300.0)
        xs = np.array([sample_patience(rng, params) for _ in range(100_000)])
        assert xs.mean() == pytest.approx(600.0, rel=0.02)

    def test_abandonment_cdf_matches_gamma(self):
        # KS distance between the empirical sample and the analytic CDF.
        from scipy import stats

        rng = np.random.default_rng(11)
        params = PatienceParams(shape=2.0, scale=300.0)
        xs = np.array([sample_patience(rng, params) for _ in range(100_000)])
        ks = stats.kstest(xs, "gamma", args=(2.0, 0.0, 300.0)).statistic
        assert ks < 0.01

    def test_should_abandon_threshold(self):
        assert not should_abandon(100.0, 100.0)  # strict exceedance
        assert should_abandon(100.1, 100.0)
        assert not should_abandon(0.0, 5.0)

    def test_should_abandon_never_with_infinite_patience(self):
        assert not should_abandon(1e12, math.inf)

    def test_rejects_negative_elapsed(self):
        with pytest.raises(ValueError):
            should_abandon(-1.0, 10.0)


class TestParamValidation:
    def test_arrival_params(self):
        with pytest.raises(ValueError):
            ArrivalParams(lambda_segment=0.0, noise_sigma=1.0)
        with pytest.raises(ValueError):
            ArrivalParams(lambda_segment=1.0, noise_sigma=-1.0)

    def test_patience_params(self):
        with pytest.raises(ValueError):
            PatienceParams(shape=0.0, scale=1.0)
        with pytest.raises(ValueError):
            PatienceParams(shape=1.0, scale=0.0)
