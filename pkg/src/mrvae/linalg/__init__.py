from .types import DenseMatrix, DenseVector, DiagonalVector, SpectrumDecomp
from .decomp import sym_eig, svd
from .random import RngStream, derive_seed, gaussian_sample
from .stats import data_mean, sample_covariance

__all__ = [
    "DenseMatrix",
    "DenseVector",
    "DiagonalVector",
    "SpectrumDecomp",
    "sym_eig",
    "svd",
    "RngStream",
    "derive_seed",
    "gaussian_sample",
    "data_mean",
    "sample_covariance",
]
