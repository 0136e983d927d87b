import numpy as np
import pytest

from mrvae.config.schema import BetaRange, ConstantSchedule
from mrvae.core.exceptions import NumericalError, StateError
from mrvae.linalg.random import RngStream
from mrvae.nn.linear_model import LinearMRVAE
from mrvae.nn.model import build_model
from mrvae.nn.optim import AdamState
from mrvae.io.synthetic import make_synthetic
from mrvae.training.loop import betavae_train, mrvae_train, mrvae_train_step


def _binary(n, d, seed=0):
    return (RngStream(seed).uniform(size=(n, d)) > 0.5).astype(np.float64)


def _snapshot(model):
    return {k: v.copy() for k, v in model.parameters().items()}


class TestTrainStep:
    def test_per_batch_beta_is_scalar(self, small_topology):
        model = build_model(small_topology(), RngStream(0))
        out = mrvae_train_step(model, _binary(8, 20), BetaRange(), RngStream(1), AdamState())
        assert out.beta_used.ndim == 0
        assert 0.01 <= float(out.beta_used) <= 10.0

    def test_per_example_beta(self, small_topology):
        model = build_model(small_topology(), RngStream(0))
        out = mrvae_train_step(
            model, _binary(8, 20), BetaRange(), RngStream(1), AdamState(), granularity="per_example"
        )
        assert out.beta_used.shape == (8,)
        assert np.all((out.beta_used >= 0.01) & (out.beta_used <= 10.0))

    def test_ungated_model_rejected(self, small_topology):
        model = build_model(small_topology(gated=False), RngStream(0))
        with pytest.raises(StateError):
            mrvae_train_step(model, _binary(8, 20), BetaRange(), RngStream(1), AdamState())

    def test_zero_learning_rate_leaves_parameters(self, small_topology):
        model = build_model(small_topology(), RngStream(0))
        before = _snapshot(model)
        mrvae_train_step(model, _binary(8, 20), BetaRange(), RngStream(1), AdamState(), lr=0.0)
        for name, value in model.parameters().items():
            np.testing.assert_array_equal(value, before[name])


class TestMrvaeTrain:
    def test_reproducible(self, small_topology, fast_train):
        data = _binary(64, 20)
        runs = []
        for _ in range(2):
            model = build_model(small_topology(), RngStream(0))
            runs.append(mrvae_train(model, data, fast_train()))
        a, b = runs
        assert [r.loss for r in a.history] == [r.loss for r in b.history]
        for name, value in a.model.parameters().items():
            np.testing.assert_array_equal(value, b.model.parameters()[name])

    def test_history_length_and_steps(self, small_topology, fast_train):
        result = mrvae_train(build_model(small_topology(), RngStream(0)), _binary(70, 20), fast_train())
        assert result.step == 2 * 3
        assert [r.step for r in result.history] == list(range(1, 7))
        assert {r.epoch for r in result.history} == {0, 1}

    def test_linear_model_loss_decreases(self, synthetic_spec, fast_train):
        data, _ = make_synthetic(synthetic_spec)
        model = LinearMRVAE.init(RngStream(0), 16, 4, data.mean(axis=0))
        before = model.loss_and_grads(data, 1.0)[0].loss
        mrvae_train(model, data, fast_train(epochs=6, batch_size=256, learning_rate=0.01))
        assert model.loss_and_grads(data, 1.0)[0].loss < before

    def test_numerical_failure_names_batch(self, small_topology, fast_train):
        model = build_model(small_topology(), RngStream(0))
        model.encoder_layers[0].w_base[0, 0] = np.nan
        with pytest.raises(NumericalError) as info:
            mrvae_train(model, _binary(64, 20), fast_train())
        assert info.value.batch_index == 0


class TestBetavaeTrain:
    def test_constant_schedule_records_beta(self, small_topology, fast_train):
        model = build_model(small_topology(), RngStream(0))
        result = betavae_train(model, _binary(64, 20), ConstantSchedule(beta=0.5), fast_train())
        assert all(r.beta == 0.5 for r in result.history)

    def test_degenerate_range_tracks_single_beta(self, small_topology, fast_train):
        data = _binary(128, 20, seed=4)
        config = fast_train(epochs=3, beta_range={"a": 0.999, "b": 1.001})
        multi = build_model(small_topology(), RngStream(0), beta_range=(0.999, 1.001), normalize=False)
        single = build_model(small_topology(), RngStream(0), beta_range=(0.999, 1.001), normalize=False)
        a = mrvae_train(multi, data, config)
        b = betavae_train(single, data, ConstantSchedule(beta=1.0), config)
        last_a = np.mean([r.loss for r in a.history if r.epoch == 2])
        last_b = np.mean([r.loss for r in b.history if r.epoch == 2])
        assert abs(last_a - last_b) <= 1e-3 * abs(last_b)
