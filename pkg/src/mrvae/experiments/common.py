"""
Helpers shared by the experiment modules.
"""

from pathlib import Path

import numpy as np

from mrvae.config.schema import RunConfig
from mrvae.core.exceptions import ConfigError
from mrvae.core.logging import get_logger
from mrvae.evaluation.theorem1 import rd_construct
from mrvae.io.datasets import load_dataset
from mrvae.linalg.decomp import MAX_DIM, sym_eig
from mrvae.linalg.random import RngStream
from mrvae.linalg.stats import data_mean, sample_covariance
from mrvae.linalg.types import SpectrumDecomp
from mrvae.nn.linear_model import LinearMRVAE
from mrvae.nn.model import build_model
from mrvae.training.sampling import conditioner_for

logger = get_logger(__name__)


def dataset_for(config: RunConfig):
    data, spectrum = load_dataset(config.dataset)
    if config.model is not None and data.shape[1] != config.model.data_dim:
        raise ConfigError(f"dataset has {data.shape[1]} features but model.data_dim is {config.model.data_dim}")
    return data, spectrum


def sample_spectrum(data: np.ndarray) -> SpectrumDecomp:
    """Eigendecomposition of the biased sample covariance."""
    return sym_eig(sample_covariance(data, data_mean(data)))


def linear_model_for(config: RunConfig, data: np.ndarray, rng: RngStream) -> LinearMRVAE:
    topology = config.model
    train = config.train
    mean = data_mean(data)
    if topology.linear_init == "construction":
        if data.shape[1] <= MAX_DIM:
            construction = rd_construct(sample_spectrum(data), topology.latent_dim)
            logger.info("linear model starts from the rate-distortion construction; eta is raw log beta")
            return LinearMRVAE.from_construction(construction, mean, train.beta_range.as_tuple())
        logger.warning(f"data dim {data.shape[1]} exceeds {MAX_DIM}; linear model falls back to random init")
    return LinearMRVAE.init(
        rng,
        topology.data_dim,
        topology.latent_dim,
        mean,
        conditioner_for(train.beta_range, train.normalize_eta),
    )


def model_for(config: RunConfig, data: np.ndarray, rng: RngStream):
    topology = config.model
    train = config.train
    if topology.kind == "linear":
        return linear_model_for(config, data, rng)
    return build_model(topology, rng, train.beta_range.as_tuple(), train.normalize_eta)


def out_path(out_dir, name: str) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path / name
