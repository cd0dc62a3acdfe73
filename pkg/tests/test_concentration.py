import math

import numpy as np
import pytest

from assortbench.concentration import (
    CiScheme,
    adaptive_ci,
    bernoulli_sampler,
    constant_sampler,
    fixed_ci,
    validate_maximal_inequality,
    validate_uniform_concentration,
)


class TestFixedCi:
    def test_delta_one_degenerates(self):
        ci = fixed_ci(5, 10, 1.0)
        assert (ci.lower, ci.upper) == (0.5, 0.5)

    def test_unit_half_width_clamps(self):
        ci = fixed_ci(0, 1, math.exp(-2.0))
        assert ci.mean == 0.0
        assert (ci.lower, ci.upper) == (0.0, 1.0)

    def test_frozen_value(self):
        ci = fixed_ci(50, 100, 1e-6)
        half = math.sqrt(math.log(1e6) / 200.0)
        assert half == pytest.approx(0.26282608848784655, abs=1e-15)
        assert ci.upper - ci.mean == pytest.approx(half, abs=1e-15)

    def test_count_zero_rejected(self):
        with pytest.raises(ValueError):
            fixed_ci(0, 0, 0.5)

    def test_sum_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            fixed_ci(11, 10, 0.5)
        with pytest.raises(ValueError):
            fixed_ci(-1, 10, 0.5)

    def test_bad_delta_rejected(self):
        with pytest.raises(ValueError):
            fixed_ci(1, 2, 0.0)
        with pytest.raises(ValueError):
            fixed_ci(1, 2, 1.5)


class TestAdaptiveCi:
    def test_floored_log(self):
        ci = adaptive_ci(1, 1, 8.0)
        assert ci.lower == ci.upper == ci.mean == 1.0

    def test_clamped_first_sample(self):
        ci = adaptive_ci(0, 1, 1e-3, 2.0)
        half = math.sqrt(2.0 * math.log(8000.0))
        assert half == pytest.approx(4.239621874804868, abs=1e-12)
        assert (ci.lower, ci.upper) == (0.0, 1.0)

    def test_frozen_value(self):
        ci = adaptive_ci(248, 496, 1e-3, 2.0)
        half = math.sqrt(2.0 * math.log(8000.0 / 496.0) / 496.0)
        assert half == pytest.approx(0.1058875867320608, abs=1e-15)
        assert ci.upper - ci.mean == pytest.approx(half, abs=1e-15)

    def test_count_zero_rejected(self):
        with pytest.raises(ValueError):
            adaptive_ci(0, 0, 0.5)

    def test_widths_comparable_to_fixed(self):
        # delta = 1/T^2 fixed vs delta = 1/T adaptive (scale 2): widths stay
        # within a factor of 4 of each other while the log terms are positive.
        for horizon in (10, 1000, 10**6):
            for t in (1, 7, horizon // 2 or 1, horizon):
                if 8.0 / (t / horizon) <= 1.0:
                    continue
                wf = math.sqrt(math.log(horizon**2) / (2 * t))
                wa = math.sqrt(2 * math.log(8 * horizon / t) / t)
                assert 0.25 <= wa / wf <= 4.0

    def test_width_decreasing_in_count(self):
        widths = [
            adaptive_ci(0, t, 1e-3, 2.0).upper - adaptive_ci(0, t, 1e-3, 2.0).mean
            for t in range(1, 2000)
        ]
        clamped = [min(w, 1.0) for w in widths]
        assert all(a >= b - 1e-15 for a, b in zip(clamped, clamped[1:]))


class TestCiScheme:
    def test_dispatch(self):
        fixed = CiScheme("fixed_level", 0.5)
        adaptive = CiScheme("adaptive_level", 0.5, scale=0.1)
        assert fixed.interval(1, 2) == fixed_ci(1, 2, 0.5)
        assert adaptive.interval(1, 2) == adaptive_ci(1, 2, 0.5, 0.1)

    def test_validation(self):
        with pytest.raises(ValueError):
            CiScheme("bogus", 0.5)
        with pytest.raises(ValueError):
            CiScheme("fixed_level", 0.0)
        with pytest.raises(ValueError):
            CiScheme("adaptive_level", 0.5, scale=0.0)


class TestUniformConcentration:
    def test_degenerate_sampler_full_coverage(self):
        rng = np.random.default_rng(0)
        cov = validate_uniform_concentration(
            constant_sampler(0.3), 0.3, 50, 0.01, 1000, rng
        )
        assert cov == 1.0

    def test_bernoulli_half(self):
        rng = np.random.default_rng(1)
        cov = validate_uniform_concentration(
            bernoulli_sampler(0.5), 0.5, 100, 1e-4, 10_000, rng
        )
        assert cov >= 0.99

    def test_bernoulli_skewed(self):
        rng = np.random.default_rng(2)
        cov = validate_uniform_concentration(
            bernoulli_sampler(0.1), 0.1, 1000, 1e-5, 10_000, rng
        )
        assert cov >= 0.99

    def test_unbounded_sampler_rejected(self):
        rng = np.random.default_rng(3)

        def unbounded(r, shape):
            return r.normal(size=shape)

        with pytest.raises(ValueError):
            validate_uniform_concentration(unbounded, 0.0, 10, 0.01, 1000, rng)


class TestMaximalInequality:
    def test_impossible_threshold(self):
        rng = np.random.default_rng(4)
        frac = validate_maximal_inequality(
            bernoulli_sampler(0.5), 0.5, 20, 20.0, 1000, rng
        )
        assert frac == 0.0

    def test_large_threshold(self):
        rng = np.random.default_rng(5)
        trials = 100_000
        frac = validate_maximal_inequality(
            bernoulli_sampler(0.5), 0.5, 100, 20.0, trials, rng
        )
        bound = math.exp(-8.0)
        slack = 3.0 * math.sqrt(bound * (1 - bound) / trials)
        assert frac <= bound + slack

    def test_moderate_threshold(self):
        rng = np.random.default_rng(6)
        trials = 100_000
        frac = validate_maximal_inequality(
            bernoulli_sampler(0.5), 0.5, 100, 5.0, trials, rng
        )
        bound = math.exp(-0.5)
        slack = 3.0 * math.sqrt(bound * (1 - bound) / trials)
        assert frac <= bound + slack

    def test_nonpositive_threshold_rejected(self):
        rng = np.random.default_rng(7)
        with pytest.raises(ValueError):
            validate_maximal_inequality(bernoulli_sampler(0.5), 0.5, 10, 0.0, 10, rng)
