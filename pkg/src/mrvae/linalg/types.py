"""
Array aliases and the spectral decomposition record shared by every module.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from mrvae.core.exceptions import DimensionError, NumericalError

DenseMatrix = NDArray[np.float64]
DenseVector = NDArray[np.float64]
# The diagonal of a diagonal matrix, stored as a 1-D array.
DiagonalVector = NDArray[np.float64]


def as_matrix(m, name: str = "matrix") -> DenseMatrix:
    """Copy into a finite float64 2-D array or raise."""
    arr = np.array(m, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} has non-finite entries")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpectrumDecomp:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    ``eigvecs[:, i]`` is the eigenvector for ``eigvals[i]``.
    """

    eigvecs: DenseMatrix
    eigvals: DiagonalVector
    source_dim: int

    def __post_init__(self):
        frozen(self.eigvecs)
        frozen(self.eigvals)

    @property
    def lambda_max(self) -> float:
        return float(self.eigvals[0])

    def top(self, k: int):
        """Leading k eigenvectors (d x k) and eigenvalues (k,)."""
        return self.eigvecs[:, :k], self.eigvals[:k]

    def reconstruct(self) -> DenseMatrix:
        return (self.eigvecs * self.eigvals) @ self.eigvecs.T

    @classmethod
    def from_eigvals(cls, eigvals, eigvecs=None) -> "SpectrumDecomp":
        """Build a decomposition directly from a known spectrum (identity basis by default)."""
        vals = np.array(eigvals, dtype=np.float64)
        order = np.argsort(-vals, kind="stable")
        vals = vals[order]
        if eigvecs is None:
            vecs = np.eye(vals.size)
        else:
            vecs = np.array(eigvecs, dtype=np.float64)[:, order]
        return cls(eigvecs=vecs, eigvals=vals, source_dim=vals.size)
