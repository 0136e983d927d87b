"""
Reproducible random streams.

``RngStream`` wraps numpy's counter-based Philox bit generator. Child streams
are derived from a parent seed and a text label, so each purpose (weight
init, beta sampling, reparameterization noise, data) gets its own stream
and adding draws to one never shifts another.
"""

import hashlib

import numpy as np

from mrvae.core.exceptions import DimensionError, DomainError
from mrvae.linalg.types import DenseVector, DiagonalVector

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, label: str) -> int:
    digest = hashlib.blake2b(
        f"{seed & _MASK64}:{label}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """Single-owner random stream backed by Philox."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def split(self, label: str) -> "RngStream":
        """Independent child stream; depends only on (seed, label), not on draws made so far."""
        return RngStream(derive_seed(self.seed, label))

    def standard_normal(self, size=None) -> np.ndarray:
        return self._gen.standard_normal(size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"


def gaussian_sample(rng: RngStream, mean: DenseVector, diag_std: DiagonalVector) -> DenseVector:
    """``mean + diag_std * eps`` with ``eps`` standard normal drawn from ``rng``."""
    mean = np.asarray(mean, dtype=np.float64)
    std = np.asarray(diag_std, dtype=np.float64)
    if mean.shape != std.shape:
        raise DimensionError(f"mean {mean.shape} and std {std.shape} differ")
    if np.any(std < 0):
        raise DomainError("diag_std entries must be non-negative")
    eps = rng.standard_normal(mean.shape)
    return mean + std * eps
