import os

import numpy as np
import pytest

from mrvae.core.logging import setup_logging
from mrvae.config.schema import ModelTopology, SyntheticGaussianSpec, TrainConfig
from mrvae.linalg.random import RngStream
from mrvae.linalg.types import SpectrumDecomp
from mrvae.io.synthetic import random_orthogonal


@pytest.fixture
def rng():
    return RngStream(1234)


@pytest.fixture
def random_spectrum():
    """d=8 covariance with eigenvalues spread across the default beta range."""

    def make(seed: int = 0, d: int = 8) -> SpectrumDecomp:
        r = RngStream(seed)
        lam = np.sort(np.exp(r.uniform(np.log(0.05), np.log(30.0), d)))[::-1].copy()
        return SpectrumDecomp(eigvecs=random_orthogonal(r.split("u"), d), eigvals=lam, source_dim=d)

    return make


@pytest.fixture
def small_topology():
    def make(**overrides) -> ModelTopology:
        fields = dict(
            data_dim=20,
            latent_dim=4,
            encoder_hidden=[16],
            decoder_hidden=[16],
            nonlinearity="tanh",
            likelihood="bernoulli",
        )
        fields.update(overrides)
        return ModelTopology(**fields)

    return make


@pytest.fixture
def synthetic_spec():
    return SyntheticGaussianSpec(
        dim=16,
        spectrum=[30.0, 20.0, 14.0, 10.0, 7.0, 5.0, 3.5, 2.5, 1.8, 1.2, 0.8, 0.5, 0.3, 0.2, 0.1, 0.05],
        n_samples=4096,
        seed=3,
    )


@pytest.fixture
def fast_train():
    def make(**overrides) -> TrainConfig:
        fields = dict(epochs=2, batch_size=32, learning_rate=1e-3, seed=5)
        fields.update(overrides)
        return TrainConfig(**fields)

    return make


@pytest.fixture
def mnist_idx_path():
    path = os.getenv("MRVAE_MNIST_IDX")
    if not path or not os.path.exists(path):
        pytest.skip("MRVAE_MNIST_IDX is not set to an IDX image file")
    return path


@pytest.fixture(autouse=True, scope="session")
def quiet_logging(tmp_path_factory):
    setup_logging("WARNING", str(tmp_path_factory.mktemp("logs") / "mrvae.log"), force=True)
