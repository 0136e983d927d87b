import numpy as np

from mrvae.evaluation.gradcheck import (
    DENOM_FLOOR,
    GradcheckReport,
    finite_difference_check,
    perturb_gates,
    relative_error,
)
from mrvae.linalg.random import RngStream
from mrvae.nn.model import build_model


class _ScaledGradients:
    """Wraps a model and reports gradients off by a constant factor."""

    def __init__(self, model, factor):
        self.model = model
        self.factor = factor

    def parameters(self):
        return self.model.parameters()

    def loss_and_grads(self, x, beta, rng):
        terms, grads = self.model.loss_and_grads(x, beta, rng)
        return terms, {k: self.factor * v for k, v in grads.items()}


def _binary(n, d, seed=0):
    return (RngStream(seed).uniform(size=(n, d)) > 0.5).astype(np.float64)


class TestRelativeError:
    def test_floor_applies_near_zero(self):
        err = relative_error(np.array([1e-9]), np.array([0.0]))
        assert err[0] == 1e-9 / DENOM_FLOOR

    def test_symmetric_scale(self):
        err = relative_error(np.array([1.0]), np.array([3.0]))
        assert err[0] == 0.5


class TestReport:
    def test_failures(self):
        report = GradcheckReport({"a": 1e-7, "b": 1e-3}, tolerance=1e-5)
        assert report.worst == 1e-3
        assert not report.ok
        assert report.failures() == {"b": 1e-3}

    def test_empty_report_passes(self):
        assert GradcheckReport({}, 1e-5).ok


class TestFiniteDifferenceCheck:
    def test_passes_on_small_model(self, small_topology):
        model = build_model(small_topology(data_dim=6, latent_dim=2, encoder_hidden=[4], decoder_hidden=[4]), RngStream(0))
        perturb_gates(model, RngStream(1))
        report = finite_difference_check(model, _binary(3, 6), 0.5, seed=4)
        assert report.ok, report.failures()
        assert set(report.max_rel_error) == set(model.parameters())

    def test_detects_wrong_gradients(self, small_topology):
        model = build_model(small_topology(data_dim=6, latent_dim=2, encoder_hidden=[4], decoder_hidden=[4]), RngStream(0))
        report = finite_difference_check(_ScaledGradients(model, 1.5), _binary(3, 6), 0.5, max_entries=3)
        assert not report.ok

    def test_parameters_restored(self, small_topology):
        model = build_model(small_topology(data_dim=6, latent_dim=2, encoder_hidden=[4], decoder_hidden=[4]), RngStream(0))
        before = {k: v.copy() for k, v in model.parameters().items()}
        finite_difference_check(model, _binary(3, 6), 0.5, max_entries=2)
        for name, value in model.parameters().items():
            np.testing.assert_array_equal(value, before[name])

    def test_perturb_touches_only_gates(self, small_topology):
        model = build_model(small_topology(), RngStream(0))
        before = {k: v.copy() for k, v in model.parameters().items()}
        perturb_gates(model, RngStream(2))
        for name, value in model.parameters().items():
            changed = np.any(value != before[name])
            assert changed == (".gate." in name)
