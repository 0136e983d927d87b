"""
Log-uniform beta sampling for hypernetwork training.
"""

from typing import Optional

import numpy as np

from mrvae.config.schema import BetaRange
from mrvae.hypergate.conditioner import BetaConditioner, normalize_eta
from mrvae.linalg.random import RngStream

__all__ = ["sample_eta", "sample_beta", "normalize_eta", "conditioner_for"]


def sample_eta(beta_range: BetaRange, rng: RngStream, size: Optional[int] = None):
    """eta ~ U[ln a, ln b]; a scalar, or ``size`` draws."""
    return rng.uniform(np.log(beta_range.a), np.log(beta_range.b), size)


def sample_beta(beta_range: BetaRange, rng: RngStream, size: Optional[int] = None):
    eta = sample_eta(beta_range, rng, size)
    # exp(log a) can round below a by one ulp
    return np.clip(np.exp(eta), beta_range.a, beta_range.b)


def conditioner_for(beta_range: BetaRange, normalize: bool = True) -> BetaConditioner:
    return BetaConditioner(beta_range.a, beta_range.b, normalize)
