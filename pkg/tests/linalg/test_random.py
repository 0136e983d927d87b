import numpy as np
import pytest

from mrvae.core.exceptions import DimensionError, DomainError
from mrvae.linalg.random import RngStream, derive_seed, gaussian_sample
from mrvae.linalg.stats import data_mean, sample_covariance


class TestRngStream:
    def test_same_seed_same_draws(self):
        np.testing.assert_array_equal(RngStream(3).standard_normal(10), RngStream(3).standard_normal(10))

    def test_split_depends_only_on_label(self):
        a = RngStream(3)
        a.standard_normal(100)
        b = RngStream(3)
        np.testing.assert_array_equal(a.split("x").uniform(size=5), b.split("x").uniform(size=5))

    def test_labels_give_distinct_streams(self):
        assert derive_seed(1, "a") != derive_seed(1, "b")
        assert not np.array_equal(RngStream(1).split("a").uniform(size=4), RngStream(1).split("b").uniform(size=4))


class TestGaussianSample:
    def test_zero_std_returns_mean(self, rng):
        mean = np.array([1.0, -2.0])
        np.testing.assert_array_equal(gaussian_sample(rng, mean, np.zeros(2)), mean)

    def test_moments(self):
        rng = RngStream(11)
        draws = np.array([gaussian_sample(rng, np.array([1.0, 2.0]), np.array([0.5, 2.0])) for _ in range(20000)])
        np.testing.assert_allclose(draws.mean(axis=0), [1.0, 2.0], atol=0.05)
        np.testing.assert_allclose(draws.std(axis=0), [0.5, 2.0], rtol=0.03)

    def test_shape_mismatch(self, rng):
        with pytest.raises(DimensionError):
            gaussian_sample(rng, np.zeros(2), np.ones(3))

    def test_negative_std(self, rng):
        with pytest.raises(DomainError):
            gaussian_sample(rng, np.zeros(2), np.array([1.0, -1.0]))


class TestStats:
    def test_covariance_is_biased(self):
        data = np.array([[0.0, 0.0], [2.0, 2.0]])
        np.testing.assert_allclose(sample_covariance(data, data_mean(data)), [[1.0, 1.0], [1.0, 1.0]])

    def test_single_row_gives_zero_covariance(self):
        data = np.array([[1.0, 2.0, 3.0]])
        np.testing.assert_array_equal(sample_covariance(data, data_mean(data)), np.zeros((3, 3)))

    def test_empty_data(self):
        with pytest.raises(DomainError):
            sample_covariance(np.zeros((0, 3)), np.zeros(3))
