"""Posterior-mean denoising, unbiasing, and thresholding rules."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from turbocs.denoiser import (
    VAR_FLOOR,
    hard_threshold_keep_s,
    soft_stats,
    soft_threshold_keep_s,
    soft_value,
    soft_variance,
    unbias,
    unbias_elementwise,
)
from turbocs.exceptions import NoInformationError
from turbocs.model import Prior

TERNARY = Prior.ternary(L=258, s=12)

# frozen reference values from a direct summation over the three atoms
# (plain w_j = p_j * exp(-(x - v_j)^2 / (2 s2)) without log-domain tricks)
DIRECT_REFERENCE = [
    # (x_tilde, sigma_e_sq, mean, variance)
    (1.0, 0.1, 0.7835419632941865, 0.16960395828127905),
    (0.5, 0.1, 0.023808417123089818, 0.023243738296263142),
    (2.0, 0.25, 0.9077465564520633, 0.08374295000834209),
    (-1.3, 0.05, -0.9999953860791249, 4.613899586836112e-06),
]


def fivepoint_prior(L=64, s=16):
    """Asymmetrically weighted 5-symbol prior used to exercise generality."""
    p = s / L
    return Prior(
        atoms=((-2.0, 0.1 * p), (-1.0, 0.2 * p), (0.0, 1 - p), (1.0, 0.3 * p), (2.0, 0.4 * p)),
        s=s,
        L=L,
    )


class TestSoftValue:
    def test_odd_symmetry_at_zero(self):
        assert soft_value(0.0, 0.1, TERNARY) == 0.0

    def test_prior_mean_limit(self):
        # with huge estimation variance the observation carries no
        # information and the posterior mean collapses to the prior mean
        assert abs(soft_value(1.7, 1e6, TERNARY)) < 1e-3

    @pytest.mark.parametrize("x, s2, mean, _", DIRECT_REFERENCE)
    def test_against_direct_summation(self, x, s2, mean, _):
        assert_allclose(soft_value(x, s2, TERNARY), mean, rtol=1e-12)

    def test_output_within_atom_range(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-30, 30, size=500)
        out = soft_stats(x, 0.05, TERNARY)
        assert np.all(out.x_hat_b >= -1.0) and np.all(out.x_hat_b <= 1.0)

    def test_monotone_in_x_tilde(self):
        grid = np.linspace(-4.0, 4.0, 1000)
        for prior in (TERNARY, fivepoint_prior()):
            vals = soft_stats(grid, 0.2, prior).x_hat_b
            assert np.all(np.diff(vals) >= 0.0)

    def test_rejects_nonpositive_variance(self):
        with pytest.raises(ValueError):
            soft_value(0.3, 0.0, TERNARY)

    def test_tiny_variance_no_overflow(self):
        # |x| ~ 3 with sigma ~ 1e-3 overflows a naive exponential
        v = soft_value(3.0, 1e-3, TERNARY)
        assert np.isfinite(v) and abs(v - 1.0) < 1e-6


class TestSoftVariance:
    def test_collapses_at_atom(self):
        assert soft_variance(1.0, 1e-12, TERNARY) <= 1e-11

    def test_prior_variance_limit(self):
        # huge sigma_e: the posterior equals the prior, variance s/L
        assert_allclose(soft_variance(0.4, 1e8, TERNARY), 12 / 258, rtol=1e-3)

    @pytest.mark.parametrize("x, s2, _, var", DIRECT_REFERENCE)
    def test_against_direct_summation(self, x, s2, _, var):
        assert_allclose(soft_variance(x, s2, TERNARY), var, rtol=1e-10)

    @pytest.mark.parametrize("sigma_e_sq", [0.1, 0.25, 1.0])
    def test_derivative_identity(self, sigma_e_sq):
        # variance == sigma_e^2 * dT/dx via central differences, step 1e-5
        grid = np.linspace(-2.0, 2.0, 1000)
        h = 1e-5
        for prior in (TERNARY, fivepoint_prior()):
            var = soft_stats(grid, sigma_e_sq, prior).var_per_element
            tp = soft_stats(grid + h, sigma_e_sq, prior).x_hat_b
            tm = soft_stats(grid - h, sigma_e_sq, prior).x_hat_b
            fd = sigma_e_sq * (tp - tm) / (2 * h)
            assert np.max(np.abs(var - fd) / np.abs(var)) <= 1e-5

    def test_average_is_mean_of_elements(self):
        rng = np.random.default_rng(1)
        out = soft_stats(rng.standard_normal(100), 0.3, TERNARY)
        assert abs(out.var_avg - np.mean(out.var_per_element)) <= 1e-12
        assert np.all(out.var_per_element >= VAR_FLOOR)


class TestSymmetry:
    def test_exact_odd_mean_and_even_variance(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(-3, 3, size=200)
        out_pos = soft_stats(x, 0.17, TERNARY)
        out_neg = soft_stats(-x, 0.17, TERNARY)
        assert_array_equal(out_neg.x_hat_b, -out_pos.x_hat_b)
        assert_array_equal(out_neg.var_per_element, out_pos.var_per_element)


class TestUnbias:
    def test_arithmetic(self):
        x_b = np.array([0.2, -0.4])
        x_t = np.array([0.3, -0.5])
        x, var = unbias(x_b, x_t, 0.05, 0.1)
        assert_allclose(var, 0.1)
        assert_allclose(x, 2 * x_b - x_t)

    def test_fixed_point(self):
        x_t = np.array([0.7, -0.2])
        x, _ = unbias(x_t, x_t, 0.05, 0.1)
        assert_allclose(x, x_t)

    def test_small_variance_limit(self):
        x_b = np.array([0.9])
        x, var = unbias(x_b, np.array([1.5]), 1e-9, 0.1)
        assert_allclose(var, 1e-9, rtol=1e-6)
        assert_allclose(x, x_b, rtol=1e-6)

    def test_round_trip(self):
        # algebraic inverse: re-bias the unbiased pair and recover the input
        rng = np.random.default_rng(3)
        x_t = rng.standard_normal(50)
        x_b = 0.5 * x_t + 0.1 * rng.standard_normal(50)
        var_b, var_e = 0.04, 0.09
        x_u, var_u = unbias(x_b, x_t, var_b, var_e)
        var_back = 1.0 / (1.0 / var_u + 1.0 / var_e)
        x_back = var_back * (x_u / var_u + x_t / var_e)
        assert abs(var_back - var_b) <= 1e-12
        assert np.max(np.abs(x_back - x_b)) <= 1e-12

    def test_no_information_error(self):
        with pytest.raises(NoInformationError):
            unbias(np.zeros(3), np.zeros(3), 0.2, 0.1)
        with pytest.raises(NoInformationError):
            unbias(np.zeros(3), np.zeros(3), 0.1, 0.1)

    def test_elementwise_fallback(self):
        x_b = np.array([0.5, 0.5])
        x_t = np.array([1.0, 1.0])
        var_b = np.array([0.05, 0.3])  # second element: no information
        var_e = np.array([0.1, 0.1])
        x, var = unbias_elementwise(x_b, x_t, var_b, var_e)
        assert_allclose(x[0], 2 * 0.5 - 1.0)
        assert_allclose(var[0], 0.1)
        assert x[1] == 0.5 and var[1] == 0.3


class TestHardThreshold:
    def test_keeps_largest(self):
        out = hard_threshold_keep_s(np.array([3.0, -1.0, 2.0, 0.0]), 2)
        assert_array_equal(out, [3.0, 0.0, 2.0, 0.0])

    def test_s_equal_length_is_identity(self):
        x = np.array([1.0, -2.0, 0.5])
        assert_array_equal(hard_threshold_keep_s(x, 3), x)

    def test_s_zero(self):
        assert_array_equal(hard_threshold_keep_s(np.ones(4), 0), np.zeros(4))

    def test_nonzero_count(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            x = rng.standard_normal(20)
            x[rng.random(20) < 0.5] = 0.0
            s = int(rng.integers(0, 21))
            out = hard_threshold_keep_s(x, s)
            assert np.count_nonzero(out) == min(s, np.count_nonzero(x))

    def test_tie_lowest_index(self):
        out = hard_threshold_keep_s(np.array([1.0, -1.0, 1.0]), 2)
        assert_array_equal(out, [1.0, -1.0, 0.0])


class TestSoftThreshold:
    def test_shrinks_by_order_statistic(self):
        out = soft_threshold_keep_s(np.array([3.0, -1.0, 2.0, 0.0]), 2)
        assert_array_equal(out, [2.0, 0.0, 1.0, 0.0])

    def test_all_equal_magnitudes(self):
        out = soft_threshold_keep_s(np.array([1.0, -1.0, 1.0, -1.0]), 2)
        assert_array_equal(out, np.zeros(4))

    def test_s_one_less_than_length(self):
        out = soft_threshold_keep_s(np.array([4.0, -2.0, 1.0]), 2)
        assert_array_equal(out, [3.0, -1.0, 0.0])

    def test_at_most_s_nonzeros(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            x = rng.standard_normal(20)
            s = int(rng.integers(0, 20))
            assert np.count_nonzero(soft_threshold_keep_s(x, s)) <= s
