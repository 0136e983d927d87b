import numpy as np
import pytest

from mrvae.analytic.linear_vae import (
    LOG_2PI,
    DatasetMoments,
    LinearVAEParams,
    analytic_rd_point,
    beta_objective,
    distortion_closed_form,
    grad_C,
    grad_E,
    kl_closed_form,
    objective_gradients,
    optimal_C,
    optimal_D,
    optimal_E,
    optimal_params,
)
from mrvae.core.exceptions import DimensionError, DomainError
from mrvae.linalg.random import RngStream
from mrvae.linalg.types import SpectrumDecomp


def _random_params(rng, d, k, mean=None):
    return LinearVAEParams(
        enc_weight=rng.standard_normal((k, d)) * 0.5,
        cov_diag=np.exp(rng.uniform(-1.0, 0.5, k)),
        dec_weight=rng.standard_normal((d, k)) * 0.5,
        mean=np.zeros(d) if mean is None else mean,
    )


def _moments(spectrum, count=1):
    return DatasetMoments.from_spectrum(spectrum, count=count)


def _mc_terms(params, spectrum, rng, n=200_000):
    """Per-draw KL and negative log-likelihood for x ~ N(0, S), z ~ q(z|x)."""
    u, lam = spectrum.eigvecs, spectrum.eigvals
    x = (rng.standard_normal((n, u.shape[0])) * np.sqrt(lam)) @ u.T
    e, c, dmat = params.enc_weight, params.cov_diag, params.dec_weight
    zm = x @ e.T
    kl = 0.5 * (-np.sum(np.log(c)) + np.sum(zm * zm, axis=1) + np.sum(c) - c.size)
    z = zm + np.sqrt(c) * rng.standard_normal(zm.shape)
    diff = x - z @ dmat.T
    nll = 0.5 * np.sum(diff * diff, axis=1) + 0.5 * x.shape[1] * LOG_2PI
    return kl, nll


def _within_se(samples, value, n_se=3.0):
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - value) <= n_se * se + 1e-12, (samples.mean(), value, se)


class TestClosedForms:
    def test_kl_zero_at_prior(self):
        params = LinearVAEParams(np.zeros((2, 3)), np.ones(2), np.zeros((3, 2)), np.zeros(3))
        moments = _moments(SpectrumDecomp.from_eigvals([3.0, 2.0, 1.0]))
        assert kl_closed_form(params, moments) == 0.0

    def test_kl_with_e_variance(self):
        k = 3
        params = LinearVAEParams(np.zeros((k, 4)), np.full(k, np.e), np.zeros((4, k)), np.zeros(4))
        moments = _moments(SpectrumDecomp.from_eigvals([1.0] * 4))
        assert kl_closed_form(params, moments) == pytest.approx(k * (np.e - 2.0) / 2.0, abs=1e-12)

    def test_distortion_at_zero_model(self):
        params = LinearVAEParams(np.zeros((1, 2)), np.ones(1), np.zeros((2, 1)), np.zeros(2))
        moments = _moments(SpectrumDecomp.from_eigvals([1.0, 1.0]))
        assert distortion_closed_form(params, moments) == pytest.approx(1.0 + LOG_2PI, abs=1e-12)

    def test_distortion_perfect_reconstruction(self):
        d = 3
        c = np.full(d, 1e-12)
        params = LinearVAEParams(np.eye(d), c, np.eye(d), np.zeros(d))
        moments = _moments(SpectrumDecomp.from_eigvals([2.0, 1.0, 0.5]))
        expected = 0.5 * np.sum(c) + 0.5 * d * LOG_2PI
        assert distortion_closed_form(params, moments) == pytest.approx(expected, abs=1e-12)

    def test_nonpositive_covariance(self):
        params = LinearVAEParams(np.zeros((1, 2)), np.zeros(1), np.zeros((2, 1)), np.zeros(2))
        with pytest.raises(DomainError):
            kl_closed_form(params, _moments(SpectrumDecomp.from_eigvals([1.0, 1.0])))

    def test_dimension_mismatch(self):
        params = LinearVAEParams(np.zeros((1, 2)), np.ones(1), np.zeros((2, 1)), np.zeros(2))
        with pytest.raises(DimensionError):
            distortion_closed_form(params, _moments(SpectrumDecomp.from_eigvals([1.0, 1.0, 1.0])))

    def test_latent_larger_than_data(self):
        with pytest.raises(DimensionError):
            LinearVAEParams(np.zeros((3, 2)), np.ones(3), np.zeros((2, 3)), np.zeros(2))

    def test_mean_offset_adds_to_second_moment(self):
        data = RngStream(2).standard_normal((50, 3)) + 1.0
        moments = DatasetMoments.from_data(data)
        shifted = LinearVAEParams(np.ones((1, 3)), np.ones(1), np.zeros((3, 1)), np.zeros(3))
        centered = LinearVAEParams(np.ones((1, 3)), np.ones(1), np.zeros((3, 1)), moments.mean_mle.copy())
        assert kl_closed_form(shifted, moments) > kl_closed_form(centered, moments)


class TestMonteCarloOracles:
    @pytest.mark.parametrize("seed", range(8))
    def test_closed_forms_match_sampling(self, seed, random_spectrum):
        rng = RngStream(seed)
        spectrum = random_spectrum(seed, d=6)
        params = _random_params(rng.split("params"), 6, 3)
        kl, nll = _mc_terms(params, spectrum, rng.split("mc"))
        moments = _moments(spectrum)
        _within_se(kl, kl_closed_form(params, moments))
        _within_se(nll, distortion_closed_form(params, moments))
        _within_se(nll + 2.0 * kl, beta_objective(params, moments, 2.0))


class TestObjective:
    def test_linear_in_beta(self, random_spectrum):
        params = _random_params(RngStream(1), 8, 3)
        moments = _moments(random_spectrum(1))
        diff = beta_objective(params, moments, 2.0) - beta_objective(params, moments, 1.0)
        assert diff == pytest.approx(kl_closed_form(params, moments), rel=1e-12)

    @pytest.mark.parametrize("beta", [0.0, -1.0])
    def test_nonpositive_beta(self, beta, random_spectrum):
        with pytest.raises(DomainError):
            beta_objective(_random_params(RngStream(1), 8, 3), _moments(random_spectrum(1)), beta)


class TestGradients:
    def test_match_finite_differences(self, random_spectrum):
        rng = RngStream(4)
        d, k, beta, n = 5, 2, 0.7, 10
        spectrum = random_spectrum(4, d=d)
        moments = _moments(spectrum, count=n)
        params = _random_params(rng, d, k)
        d_e, d_c, d_d = objective_gradients(params, moments, beta)

        def total(e=params.enc_weight, c=params.cov_diag, dm=params.dec_weight):
            return n * beta_objective(LinearVAEParams(e, c, dm, params.mean), moments, beta)

        h = 1e-6
        for name, arr, grad in (
            ("E", params.enc_weight, d_e),
            ("C", params.cov_diag, d_c),
            ("D", params.dec_weight, d_d),
        ):
            numeric = np.zeros_like(arr)
            for idx in np.ndindex(arr.shape):
                up, down = arr.copy(), arr.copy()
                up[idx] += h
                down[idx] -= h
                kw = {"E": "e", "C": "c", "D": "dm"}[name]
                numeric[idx] = (total(**{kw: up}) - total(**{kw: down})) / (2 * h)
            np.testing.assert_allclose(grad, numeric, rtol=1e-6, atol=1e-5, err_msg=name)

    def test_critical_points(self, random_spectrum):
        rng = RngStream(8)
        moments = _moments(random_spectrum(8), count=100)
        dmat = rng.standard_normal((8, 3))
        for beta in (0.05, 1.0, 7.0):
            params = LinearVAEParams(optimal_E(dmat, beta), optimal_C(dmat, beta), dmat, np.zeros(8))
            np.testing.assert_allclose(grad_C(params, moments, beta), 0.0, atol=1e-10)
            np.testing.assert_allclose(grad_E(params, moments, beta), 0.0, atol=1e-10)

    def test_per_datum_scaling(self, random_spectrum):
        params = _random_params(RngStream(3), 8, 2)
        moments = _moments(random_spectrum(3), count=40)
        total = objective_gradients(params, moments, 1.5)
        per = objective_gradients(params, moments, 1.5, total=False)
        for t, p in zip(total, per):
            np.testing.assert_allclose(t, 40 * p, rtol=1e-14)


class TestOptima:
    def test_optimal_c_examples(self):
        np.testing.assert_array_equal(optimal_C(np.zeros((3, 2)), 0.5), [1.0, 1.0])
        dmat = np.array([[np.sqrt(2.0)], [0.0]])
        assert optimal_C(dmat, 2.0)[0] == pytest.approx(0.5)

    def test_optimal_e_examples(self):
        np.testing.assert_array_equal(optimal_E(np.zeros((3, 2)), 1.0), np.zeros((2, 3)))
        np.testing.assert_allclose(optimal_E(np.eye(3), 1.0), 0.5 * np.eye(3), atol=1e-15)

    def test_optimal_d_column_scales(self):
        spectrum = SpectrumDecomp.from_eigvals([4.0, 1.0])
        dmat = optimal_D(spectrum, 1.0, 2)
        np.testing.assert_allclose(np.linalg.norm(dmat, axis=0), [np.sqrt(3.0), 0.0], atol=1e-15)

    def test_full_collapse(self, random_spectrum):
        spectrum = random_spectrum(2)
        np.testing.assert_array_equal(optimal_D(spectrum, spectrum.lambda_max, 4), 0.0)

    def test_latent_too_large(self):
        with pytest.raises(DimensionError):
            optimal_D(SpectrumDecomp.from_eigvals([1.0, 2.0]), 1.0, 3)

    def test_optimum_is_local_minimum(self, random_spectrum):
        spectrum = random_spectrum(5)
        moments = _moments(spectrum)
        beta, k = 0.5, 4
        best = optimal_params(spectrum, beta, k)
        base = beta_objective(best, moments, beta)
        rng = RngStream(6)
        for _ in range(1000):
            trial = LinearVAEParams(
                best.enc_weight + 1e-2 * rng.standard_normal(best.enc_weight.shape),
                best.cov_diag * np.exp(1e-2 * rng.standard_normal(k)),
                best.dec_weight + 1e-2 * rng.standard_normal(best.dec_weight.shape),
                best.mean,
            )
            assert beta_objective(trial, moments, beta) >= base - 1e-12


class TestAnalyticRD:
    def test_collapse_iff_beta_at_least_lambda_max(self, random_spectrum):
        spectrum = random_spectrum(9)
        lam = spectrum.lambda_max
        assert analytic_rd_point(spectrum, lam, 4)[0] == 0.0
        assert analytic_rd_point(spectrum, 2 * lam, 4)[0] == 0.0
        assert analytic_rd_point(spectrum, 0.99 * lam, 4)[0] > 0.0

    def test_monotone_curve(self, random_spectrum):
        spectrum = random_spectrum(10)
        betas = np.exp(np.linspace(np.log(0.01), np.log(50.0), 40))
        points = np.array([analytic_rd_point(spectrum, b, 4) for b in betas])
        assert np.all(np.diff(points[:, 0]) <= 0)
        assert np.all(np.diff(points[:, 1]) >= 0)

    @pytest.mark.parametrize("beta", [0.25, 1.0])
    def test_matches_sampling(self, beta):
        spectrum = SpectrumDecomp.from_eigvals([4.0, 2.0, 1.0, 0.5])
        rate, distortion = analytic_rd_point(spectrum, beta, 4)
        kl, nll = _mc_terms(optimal_params(spectrum, beta, 4), spectrum, RngStream(21))
        _within_se(kl, rate)
        _within_se(nll, distortion)
