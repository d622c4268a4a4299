"""Problem generation, quantization, and SER scoring."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from turbocs.exceptions import ConfigurationError
from turbocs.model import (
    Prior,
    ProblemInstance,
    gen_sensing_matrix,
    gen_signal,
    inv_noise_db_to_sigma_sq,
    make_instance,
    observe,
    quantize_final,
    ser,
)


class TestPrior:
    def test_ternary_atoms(self):
        p = Prior.ternary(L=258, s=12)
        assert p.atoms == ((-1.0, 12 / 516), (0.0, 246 / 258), (1.0, 12 / 516))
        assert p.symmetric

    def test_prior_variance_ternary(self):
        p = Prior.ternary(L=258, s=12)
        assert_allclose(p.variance, 12 / 258, atol=1e-15)

    def test_rejects_bad_probabilities(self):
        with pytest.raises(ConfigurationError):
            Prior(atoms=((-1.0, 0.3), (0.0, 0.3), (1.0, 0.3)), s=12, L=20)

    def test_rejects_missing_zero_atom(self):
        with pytest.raises(ConfigurationError):
            Prior(atoms=((-1.0, 0.5), (1.0, 0.5)), s=10, L=20)

    def test_rejects_wrong_zero_probability(self):
        with pytest.raises(ConfigurationError):
            Prior(atoms=((-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)), s=4, L=20)

    def test_asymmetric_prior_flag(self):
        p = Prior(atoms=((0.0, 0.8), (1.0, 0.1), (2.0, 0.1)), s=4, L=20)
        assert not p.symmetric


class TestGenSensingMatrix:
    def test_unit_column_norms(self):
        rng = np.random.default_rng(0)
        a = gen_sensing_matrix(129, 258, rng)
        assert_allclose(np.linalg.norm(a, axis=0), 1.0, atol=1e-12)

    def test_deterministic_given_seed(self):
        a1 = gen_sensing_matrix(20, 40, np.random.default_rng(42))
        a2 = gen_sensing_matrix(20, 40, np.random.default_rng(42))
        assert_array_equal(a1, a2)

    def test_entries_zero_mean(self):
        # law-of-large-numbers check on >= 1e6 draws; column scaling is
        # ~1/sqrt(K), so rescale before comparing against the 5e-3 band
        rng = np.random.default_rng(1)
        K, L = 1000, 1001
        a = gen_sensing_matrix(K, L, rng)
        assert abs(np.mean(a) * np.sqrt(K)) < 5e-3

    def test_rejects_overdetermined(self):
        with pytest.raises(ConfigurationError):
            gen_sensing_matrix(40, 40, np.random.default_rng(0))


class TestGenSignal:
    def test_exact_sparsity_always(self):
        prior = Prior.ternary(L=50, s=7)
        rng = np.random.default_rng(2)
        for _ in range(200):
            x = gen_signal(prior, rng)
            assert np.count_nonzero(x) == 7
            assert set(np.unique(x)) <= {-1.0, 0.0, 1.0}

    def test_symbol_frequencies(self):
        prior = Prior.ternary(L=64, s=8)
        rng = np.random.default_rng(3)
        pos = total = 0
        for _ in range(10_000):
            x = gen_signal(prior, rng)
            pos += np.sum(x == 1.0)
            total += 8
        assert abs(pos / total - 0.5) < 0.02

    def test_zero_sparsity(self):
        prior = Prior.ternary(L=10, s=0)
        assert_array_equal(gen_signal(prior, np.random.default_rng(4)), np.zeros(10))


class TestObserve:
    def test_noiseless_is_exact(self):
        rng = np.random.default_rng(5)
        a = gen_sensing_matrix(8, 16, rng)
        x = gen_signal(Prior.ternary(16, 3), rng)
        assert_array_equal(observe(a, x, 0.0, rng), a @ x)

    def test_noise_variance(self):
        # x = 0 so y is pure noise; sample variance of 1e5 draws within 3%
        rng = np.random.default_rng(6)
        a = gen_sensing_matrix(100, 200, rng)
        x = np.zeros(200)
        draws = np.concatenate([observe(a, x, 0.25, rng) for _ in range(1000)])
        assert draws.size == 100_000
        assert abs(np.var(draws) / 0.25 - 1.0) < 0.03

    def test_deterministic_given_seed(self):
        a = gen_sensing_matrix(8, 16, np.random.default_rng(7))
        x = np.zeros(16)
        y1 = observe(a, x, 0.1, np.random.default_rng(8))
        y2 = observe(a, x, 0.1, np.random.default_rng(8))
        assert_array_equal(y1, y2)


class TestQuantizeFinal:
    def test_nearest_symbol_rounding(self):
        prior = Prior.ternary(L=4, s=2)
        q = quantize_final(np.array([0.9, -0.8, 0.1, 0.05]), prior)
        assert_array_equal(q, [1.0, -1.0, 0.0, 0.0])

    def test_idempotent_on_valid_vectors(self):
        prior = Prior.ternary(L=6, s=2)
        x = np.array([0.0, 1.0, 0.0, -1.0, 0.0, 0.0])
        assert_array_equal(quantize_final(x, prior), x)

    def test_all_zero_tie_breaking(self):
        # ties keep the lowest indices; 0 maps to the smaller of {-1, +1}
        prior = Prior.ternary(L=5, s=2)
        q = quantize_final(np.zeros(5), prior)
        assert_array_equal(q, [-1.0, -1.0, 0.0, 0.0, 0.0])

    def test_output_sparsity_and_alphabet(self):
        prior = Prior.ternary(L=30, s=5)
        rng = np.random.default_rng(9)
        for _ in range(50):
            q = quantize_final(rng.standard_normal(30), prior)
            assert np.count_nonzero(q) == 5
            assert set(np.unique(q)) <= {-1.0, 0.0, 1.0}


class TestSer:
    def test_identical(self):
        assert ser(np.ones(5), np.ones(5)) == 0.0

    def test_fully_different(self):
        assert ser(np.ones(5), np.zeros(5)) == 1.0

    def test_half(self):
        assert ser(np.array([1.0, 0, 0, 0]), np.array([0.0, 0, 0, 1])) == 0.5

    def test_symmetric_and_permutation_invariant(self):
        rng = np.random.default_rng(10)
        a = rng.integers(-1, 2, size=40).astype(float)
        b = rng.integers(-1, 2, size=40).astype(float)
        assert ser(a, b) == ser(b, a)
        perm = rng.permutation(40)
        assert ser(a[perm], b[perm]) == ser(a, b)


class TestInstance:
    def test_make_instance_valid(self):
        rng = np.random.default_rng(11)
        inst = make_instance(10, 20, Prior.ternary(20, 3), 0.01, rng)
        assert inst.K == 10 and inst.L == 20
        assert np.count_nonzero(inst.x_true) == 3

    def test_instance_rejects_wrong_sparsity(self):
        rng = np.random.default_rng(12)
        a = gen_sensing_matrix(10, 20, rng)
        with pytest.raises(ConfigurationError):
            ProblemInstance(
                A=a, x_true=np.zeros(20), y=np.zeros(10),
                sigma_n_sq=0.01, prior=Prior.ternary(20, 3),
            )

    def test_db_conversion(self):
        assert_allclose(inv_noise_db_to_sigma_sq(17.0), 10**-1.7)
        assert_allclose(inv_noise_db_to_sigma_sq(0.0), 1.0)
