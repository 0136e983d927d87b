import numpy as np

from mrvae.core.exceptions import DimensionError, DomainError
from mrvae.linalg.types import DenseMatrix, DenseVector


def sample_covariance(data, mean) -> DenseMatrix:
    """Biased (1/n) covariance of the rows of ``data`` about ``mean``."""
    x = np.asarray(data, dtype=np.float64)
    mu = np.asarray(mean, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"data must be n x d, got shape {x.shape}")
    if mu.shape != (x.shape[1],):
        raise DimensionError(f"mean shape {mu.shape} does not match data width {x.shape[1]}")
    n = x.shape[0]
    if n < 1:
        raise DomainError("sample_covariance needs at least one row")
    centered = x - mu
    cov = centered.T @ centered / n
    return 0.5 * (cov + cov.T)


def data_mean(data) -> DenseVector:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise DomainError(f"data must be a non-empty n x d array, got shape {x.shape}")
    return x.mean(axis=0)
