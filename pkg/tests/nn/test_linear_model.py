import numpy as np
import pytest

from mrvae.analytic.linear_vae import DatasetMoments, analytic_rd_point, beta_objective, optimal_params
from mrvae.core.exceptions import ConfigError, DomainError
from mrvae.evaluation.gradcheck import finite_difference_check, perturb_gates
from mrvae.evaluation.theorem1 import rd_construct, theorem1_construct
from mrvae.experiments.common import sample_spectrum
from mrvae.linalg.random import RngStream
from mrvae.linalg.stats import data_mean
from mrvae.nn.linear_model import LinearMRVAE
from mrvae.training.loop import mrvae_train


@pytest.fixture
def data():
    r = RngStream(8)
    return r.standard_normal((64, 6)) * np.array([3.0, 2.0, 1.5, 1.0, 0.5, 0.2]) + 1.0


class TestLinearMRVAE:
    def test_shapes(self, data):
        model = LinearMRVAE.init(RngStream(0), 6, 3, data.mean(axis=0))
        params = model.response(1.0)
        assert params.enc_weight.shape == (3, 6)
        assert params.dec_weight.shape == (6, 3)
        assert params.cov_diag.shape == (3,)
        assert np.all(params.cov_diag > 0)

    def test_loss_matches_closed_form(self, data):
        model = LinearMRVAE.init(RngStream(0), 6, 3, data.mean(axis=0))
        terms, _ = model.loss_and_grads(data, 0.7)
        want = beta_objective(model.response(0.7), DatasetMoments.from_data(data), 0.7)
        assert terms.loss == pytest.approx(want, rel=1e-12)
        assert terms.loss == pytest.approx(terms.distortion + 0.7 * terms.rate, rel=1e-12)

    @pytest.mark.parametrize("beta", [0.05, 1.0, 6.0])
    def test_gradients_match_finite_differences(self, data, beta):
        model = LinearMRVAE.init(RngStream(1), 6, 3, data.mean(axis=0))
        perturb_gates(model, RngStream(2))
        report = finite_difference_check(model, data, beta)
        assert report.ok, report.failures()

    def test_gradient_keys(self, data):
        model = LinearMRVAE.init(RngStream(0), 6, 3, data.mean(axis=0))
        _, grads = model.loss_and_grads(data, 1.0)
        assert set(grads) == set(model.parameters())

    def test_rejects_per_example_beta(self, data):
        model = LinearMRVAE.init(RngStream(0), 6, 3, data.mean(axis=0))
        with pytest.raises(ConfigError):
            model.loss_and_grads(data, np.ones(64))
        with pytest.raises(DomainError):
            model.response(-1.0)

    def test_encode_decode_shapes(self, data):
        model = LinearMRVAE.init(RngStream(0), 6, 3, data.mean(axis=0))
        z_mean, z_logvar = model.encode(data[:5], 1.0)
        assert z_mean.shape == z_logvar.shape == (5, 3)
        assert model.decode(z_mean, 1.0).shape == (5, 6)


class TestFromConstruction:
    def test_response_equals_construction(self, random_spectrum):
        spectrum = random_spectrum(seed=4, d=6)
        dec = RngStream(5).standard_normal((6, 3))
        construction = theorem1_construct(spectrum, dec, 3)
        model = LinearMRVAE.from_construction(construction)
        for beta in (0.02, 0.5, 3.0):
            got, want = model.response(beta), construction.response(beta)
            np.testing.assert_array_equal(got.enc_weight, want.enc_weight)
            np.testing.assert_array_equal(got.cov_diag, want.cov_diag)
            np.testing.assert_array_equal(got.dec_weight, want.dec_weight)

    def test_copies_are_independent(self, random_spectrum):
        construction = theorem1_construct(random_spectrum(d=6), RngStream(5).standard_normal((6, 3)), 3)
        model = LinearMRVAE.from_construction(construction)
        model.enc1.base[:] = 0.0
        assert np.any(construction.enc1.base != 0.0)


class TestRateDistortionStart:
    @pytest.fixture
    def gaussian(self):
        return RngStream(11).standard_normal((2000, 6)) * np.array([3.0, 2.0, 1.5, 1.0, 0.5, 0.2])

    def test_response_is_the_joint_optimum(self, random_spectrum):
        spectrum = random_spectrum(seed=2, d=6)
        model = LinearMRVAE.from_construction(rd_construct(spectrum, 3))
        for beta in (0.02, 0.5, 3.0, 20.0):
            got, want = model.response(beta), optimal_params(spectrum, beta, 3)
            np.testing.assert_allclose(got.enc_weight, want.enc_weight, atol=1e-10)
            np.testing.assert_allclose(got.cov_diag, want.cov_diag, atol=1e-10)
            np.testing.assert_allclose(got.dec_weight, want.dec_weight, atol=1e-10)

    def test_gradients_match_finite_differences(self, gaussian):
        model = LinearMRVAE.from_construction(rd_construct(sample_spectrum(gaussian), 3), data_mean(gaussian))
        perturb_gates(model, RngStream(3))
        report = finite_difference_check(model, gaussian[:64], 0.8)
        assert report.ok, report.failures()

    def test_full_batch_training_stays_optimal(self, gaussian, fast_train):
        spectrum = sample_spectrum(gaussian)
        model = LinearMRVAE.from_construction(rd_construct(spectrum, 3), data_mean(gaussian))
        mrvae_train(model, gaussian, fast_train(epochs=20, batch_size=2000), RngStream(4))
        for beta in (0.02, 0.3, 1.0, 5.0):
            rate, distortion = analytic_rd_point(spectrum, beta, 3)
            terms, _ = model.loss_and_grads(gaussian, beta)
            assert terms.loss == pytest.approx(distortion + beta * rate, rel=1e-3)
