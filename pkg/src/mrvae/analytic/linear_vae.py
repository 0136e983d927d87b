"""
Closed-form linear VAE.

Model: q(z|x) = N(E (x - mu), diag(C)), p(x|z) = N(D z + mu, I), p(z) = N(0, I).
Dataset expectations of quadratic forms are evaluated as traces against the
second moment about ``mu``, which is the sample covariance S when ``mu`` is
the data mean. All objective values are per-datum averages in nats and
include the Gaussian constant (d/2) log 2 pi in the distortion.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from mrvae.core.exceptions import DimensionError, DomainError
from mrvae.linalg.stats import data_mean, sample_covariance
from mrvae.linalg.types import (
    DenseMatrix,
    DenseVector,
    DiagonalVector,
    SpectrumDecomp,
    frozen,
)

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class LinearVAEParams:
    enc_weight: DenseMatrix  # E, k x d
    cov_diag: DiagonalVector  # C, k
    dec_weight: DenseMatrix  # D, d x k
    mean: DenseVector  # mu, d
    obs_var: float = 1.0

    def __post_init__(self):
        k, d = np.shape(self.enc_weight)
        if np.shape(self.dec_weight) != (d, k):
            raise DimensionError(
                f"decoder weight must be {d}x{k}, got {np.shape(self.dec_weight)}"
            )
        if np.shape(self.cov_diag) != (k,):
            raise DimensionError(f"covariance diagonal must have length {k}")
        if np.shape(self.mean) != (d,):
            raise DimensionError(f"mean must have length {d}")
        if k > d:
            raise DimensionError(f"latent dim {k} exceeds data dim {d}")
        if self.obs_var != 1.0:
            raise DomainError("only unit observation variance is supported")

    @property
    def latent_dim(self) -> int:
        return int(np.shape(self.enc_weight)[0])

    @property
    def data_dim(self) -> int:
        return int(np.shape(self.enc_weight)[1])


@dataclass(frozen=True)
class DatasetMoments:
    mean_mle: DenseVector
    cov: DenseMatrix
    count: int

    def __post_init__(self):
        frozen(np.asarray(self.mean_mle))
        frozen(np.asarray(self.cov))

    @classmethod
    def from_data(cls, data) -> "DatasetMoments":
        mu = data_mean(data)
        return cls(mean_mle=mu, cov=sample_covariance(data, mu), count=int(np.shape(data)[0]))

    @classmethod
    def from_spectrum(cls, spectrum: SpectrumDecomp, count: int = 1) -> "DatasetMoments":
        return cls(
            mean_mle=np.zeros(spectrum.source_dim),
            cov=spectrum.reconstruct(),
            count=count,
        )

    def second_moment(self, mean: DenseVector) -> DenseMatrix:
        """E[(x - mean)(x - mean)^T] over the dataset."""
        delta = np.asarray(self.mean_mle) - np.asarray(mean)
        return np.asarray(self.cov) + np.outer(delta, delta)


def _check(params: LinearVAEParams, moments: DatasetMoments) -> None:
    d = params.data_dim
    if np.shape(moments.cov) != (d, d):
        raise DimensionError(
            f"moments are {np.shape(moments.cov)} but the model has data dim {d}"
        )
    if np.any(np.asarray(params.cov_diag) <= 0):
        raise DomainError("covariance diagonal must be strictly positive")


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")


def kl_closed_form(params: LinearVAEParams, moments: DatasetMoments) -> float:
    """Dataset-average KL(q(z|x) || N(0, I)) in nats."""
    _check(params, moments)
    e = np.asarray(params.enc_weight)
    c = np.asarray(params.cov_diag)
    s = moments.second_moment(params.mean)
    quad = float(np.sum((e @ s) * e))
    return 0.5 * (-float(np.sum(np.log(c))) + quad + float(np.sum(c)) - c.size)


def distortion_closed_form(params: LinearVAEParams, moments: DatasetMoments) -> float:
    """Dataset-average expected negative log-likelihood in nats."""
    _check(params, moments)
    e = np.asarray(params.enc_weight)
    c = np.asarray(params.cov_diag)
    dmat = np.asarray(params.dec_weight)
    s = moments.second_moment(params.mean)
    d = params.data_dim
    residual = np.eye(d) - dmat @ e
    noise = float(np.sum(dmat * dmat * c))
    recon = float(np.sum((residual @ s) * residual))
    return 0.5 * (noise + recon) + 0.5 * d * LOG_2PI


def beta_objective(params: LinearVAEParams, moments: DatasetMoments, beta: float) -> float:
    """distortion + beta * rate."""
    _check_beta(beta)
    return distortion_closed_form(params, moments) + beta * kl_closed_form(params, moments)


def objective_gradients(
    params: LinearVAEParams, moments: DatasetMoments, beta: float, total: bool = True
) -> Tuple[DenseMatrix, DiagonalVector, DenseMatrix]:
    """Gradients (dE, dC, dD) of the beta objective.

    With ``total`` the gradients are of the dataset-total loss (scaled by the
    moment count N), otherwise of the per-datum average.
    """
    _check_beta(beta)
    _check(params, moments)
    e = np.asarray(params.enc_weight)
    c = np.asarray(params.cov_diag)
    dmat = np.asarray(params.dec_weight)
    s = moments.second_moment(params.mean)
    dtd = dmat.T @ dmat

    grad_e = dtd @ e @ s + beta * (e @ s) - dmat.T @ s
    grad_c = 0.5 * (np.diag(dtd) + beta - beta / c)
    residual = np.eye(params.data_dim) - dmat @ e
    grad_d = dmat * c - residual @ s @ e.T

    scale = float(moments.count) if total else 1.0
    return scale * grad_e, scale * grad_c, scale * grad_d


def grad_C(params: LinearVAEParams, moments: DatasetMoments, beta: float) -> DiagonalVector:
    """Descent gradient of the dataset-total loss w.r.t. the covariance diagonal."""
    return objective_gradients(params, moments, beta)[1]


def grad_E(params: LinearVAEParams, moments: DatasetMoments, beta: float) -> DenseMatrix:
    """Descent gradient of the dataset-total loss w.r.t. the encoder weight."""
    return objective_gradients(params, moments, beta)[0]


def optimal_C(dec_weight, beta: float) -> DiagonalVector:
    _check_beta(beta)
    dmat = np.asarray(dec_weight, dtype=np.float64)
    return beta / (np.sum(dmat * dmat, axis=0) + beta)


def optimal_E(dec_weight, beta: float) -> DenseMatrix:
    _check_beta(beta)
    dmat = np.asarray(dec_weight, dtype=np.float64)
    k = dmat.shape[1]
    return np.linalg.solve(dmat.T @ dmat + beta * np.eye(k), dmat.T)


def optimal_D(spectrum: SpectrumDecomp, beta: float, k: int) -> DenseMatrix:
    """pPCA decoder with the rotation fixed to the identity."""
    _check_beta(beta)
    if k > spectrum.source_dim:
        raise DimensionError(f"latent dim {k} exceeds spectrum dim {spectrum.source_dim}")
    u, lam = spectrum.top(k)
    return u * np.sqrt(np.maximum(0.0, lam - beta))


def optimal_params(spectrum: SpectrumDecomp, beta: float, k: int) -> LinearVAEParams:
    """Jointly optimal (E*, C*, D*) at ``beta``, mean fixed to zero."""
    dmat = optimal_D(spectrum, beta, k)
    return LinearVAEParams(
        enc_weight=optimal_E(dmat, beta),
        cov_diag=optimal_C(dmat, beta),
        dec_weight=dmat,
        mean=np.zeros(spectrum.source_dim),
    )


def analytic_rd_point(spectrum: SpectrumDecomp, beta: float, k: int) -> Tuple[float, float]:
    """(rate, distortion) of the optimal linear VAE for data with covariance ``spectrum``."""
    params = optimal_params(spectrum, beta, k)
    moments = DatasetMoments.from_spectrum(spectrum)
    return kl_closed_form(params, moments), distortion_closed_form(params, moments)
