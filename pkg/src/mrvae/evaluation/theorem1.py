"""
Constructive hypernetwork for the linear VAE.

For a fixed decoder D = A S B^T and a data spectrum U diag(lambda) U^T, two
gated layers per parameter reproduce the optimal responses exactly:

    E(beta) = (2 B S^-1 * sigmoid(0)) (sigmoid(2 ln S - eta) * A^T)
    C(beta) = base * sigmoid(t eta + p)
    D(beta) = (U lambda^1/2) (sqrt(1 - exp(min(eta - ln lambda, 0))) * I)

with eta = ln beta (no input normalization). The second decoder layer is
constant; ``mode="identity"`` uses an identity gate for it and
``mode="limiting"`` a square-root gate saturated at a large negative bias.
"""

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from mrvae.analytic.linear_vae import LinearVAEParams, optimal_C, optimal_D, optimal_E, optimal_params
from mrvae.core.exceptions import ConstructionError, DimensionError
from mrvae.core.logging import get_logger
from mrvae.hypergate.activations import GateActivation
from mrvae.hypergate.gates import GateParams
from mrvae.linalg.decomp import svd
from mrvae.linalg.types import SpectrumDecomp
from mrvae.nn.linear_model import GatedDiagonal, GatedMatrix

logger = get_logger(__name__)

LIMITING_BIAS = -50.0
MODES = ("identity", "limiting")


@dataclass
class Theorem1Construction:
    enc1: GatedMatrix
    enc2: GatedMatrix
    cov: GatedDiagonal
    dec1: GatedMatrix
    dec2: GatedMatrix
    spectrum: SpectrumDecomp
    dec_weight: np.ndarray
    dec_svd: tuple
    mode: str = "identity"

    @property
    def latent_dim(self) -> int:
        return int(self.dec_weight.shape[1])

    def response(self, beta: float) -> LinearVAEParams:
        eta = np.log(float(beta))
        return LinearVAEParams(
            enc_weight=self.enc2.value(eta) @ self.enc1.value(eta),
            cov_diag=self.cov.value(eta),
            dec_weight=self.dec2.value(eta) @ self.dec1.value(eta),
            mean=np.zeros(self.spectrum.source_dim),
        )


class Theorem1Errors(NamedTuple):
    encoder: float
    covariance: float
    decoder: float

    def max(self) -> float:
        return max(self)


def _gate(size: int, kind: GateActivation, w, b) -> GateParams:
    return GateParams(np.broadcast_to(w, (size,)).copy(), np.broadcast_to(b, (size,)).copy(), kind)


def theorem1_construct(
    spectrum: SpectrumDecomp,
    dec_weight,
    k: int,
    mode: str = "identity",
    limiting_bias: float = LIMITING_BIAS,
) -> Theorem1Construction:
    """Gate parameters whose responses equal the optimal (E, C, D) at every beta."""
    if mode not in MODES:
        raise ConstructionError(f"unknown mode {mode!r}, expected one of {MODES}")
    dmat = np.array(dec_weight, dtype=np.float64)
    d = spectrum.source_dim
    if dmat.shape != (d, k):
        raise DimensionError(f"decoder must be ({d}, {k}), got {dmat.shape}")
    if k > d:
        raise DimensionError(f"latent dim {k} exceeds data dim {d}")

    sig = GateActivation.SIGMOID_ENCODER
    left, sing, right = svd(dmat)
    if np.any(sing <= 0.0):
        raise ConstructionError(
            f"decoder has {int(np.sum(sing <= 0.0))} zero singular value(s); ln S is undefined"
        )
    enc1 = GatedMatrix(left.T.copy(), _gate(k, sig, -1.0, 2.0 * np.log(sing)))
    enc2 = GatedMatrix(2.0 * right / sing, _gate(k, sig, 0.0, 0.0))

    col_norms = np.sum(dmat * dmat, axis=0)
    dead = col_norms == 0.0
    safe = np.where(dead, 1.0, col_norms)
    cov = GatedDiagonal(
        np.where(dead, np.log(2.0), 0.0),
        GateParams(np.where(dead, 0.0, 1.0), np.where(dead, 0.0, -np.log(safe)), sig),
    )

    u, lam = spectrum.top(k)
    if np.any(lam <= 0.0):
        raise ConstructionError("leading eigenvalues must be positive for the decoder response")
    xi = np.log(lam)
    dec1 = GatedMatrix(np.eye(k), _gate(k, GateActivation.SQRT_EXP_DECODER, 1.0, -xi))
    if mode == "identity":
        dec2_gate = GateParams.zeros(d, GateActivation.IDENTITY)
    else:
        dec2_gate = GateParams.zeros(d, GateActivation.SQRT_EXP_DECODER, bias=limiting_bias)
    dec2 = GatedMatrix(u * np.sqrt(lam), dec2_gate)

    logger.debug(f"built {mode} construction for d={d}, k={k}, singular values {sing}")
    return Theorem1Construction(enc1, enc2, cov, dec1, dec2, spectrum, dmat, (left, sing, right), mode)


def theorem1_verify(construction: Theorem1Construction, betas: Iterable[float]) -> Theorem1Errors:
    """Largest elementwise gap between the constructed and optimal responses over ``betas``."""
    k = construction.latent_dim
    worst = np.zeros(3)
    for beta in betas:
        got = construction.response(beta)
        want_e = optimal_E(construction.dec_weight, beta)
        want_c = optimal_C(construction.dec_weight, beta)
        want_d = optimal_D(construction.spectrum, beta, k)
        worst = np.maximum(
            worst,
            [
                np.max(np.abs(got.enc_weight - want_e)),
                np.max(np.abs(got.cov_diag - want_c)),
                np.max(np.abs(got.dec_weight - want_d)),
            ],
        )
    return Theorem1Errors(*(float(v) for v in worst))


@dataclass
class RDConstruction:
    """Gated linear hypernetwork whose response is the jointly optimal (E*, C*, D*).

    With u_i, lambda_i the leading eigenpairs and g_i(beta) = sqrt(1 - exp(min(eta - ln lambda_i, 0))):

        E(beta) = (2 lambda^-1/2 * sigmoid(0)) (g(beta) * U^T)
        C(beta) = exp(min(eta - ln lambda, 0))
        D(beta) = (U lambda^1/2) (g(beta) * I)

    Unit i collapses (zero encoder row and decoder column, unit variance)
    exactly when beta >= lambda_i.
    """

    enc1: GatedMatrix
    enc2: GatedMatrix
    cov: GatedDiagonal
    dec1: GatedMatrix
    dec2: GatedMatrix
    spectrum: SpectrumDecomp

    @property
    def latent_dim(self) -> int:
        return int(self.enc1.base.shape[0])

    def response(self, beta: float) -> LinearVAEParams:
        eta = np.log(float(beta))
        return LinearVAEParams(
            enc_weight=self.enc2.value(eta) @ self.enc1.value(eta),
            cov_diag=self.cov.value(eta),
            dec_weight=self.dec2.value(eta) @ self.dec1.value(eta),
            mean=np.zeros(self.spectrum.source_dim),
        )


def rd_construct(spectrum: SpectrumDecomp, k: int) -> RDConstruction:
    """Gate parameters tracing the analytic rate-distortion optimum at every beta."""
    d = spectrum.source_dim
    if k > d:
        raise DimensionError(f"latent dim {k} exceeds data dim {d}")
    u, lam = spectrum.top(k)
    if np.any(lam <= 0.0):
        raise ConstructionError("leading eigenvalues must be positive")
    xi = np.log(lam)
    sqrt = GateActivation.SQRT_EXP_DECODER

    enc1 = GatedMatrix(u.T.copy(), _gate(k, sqrt, 1.0, -xi))
    enc2 = GatedMatrix(np.diag(2.0 / np.sqrt(lam)), _gate(k, GateActivation.SIGMOID_ENCODER, 0.0, 0.0))
    cov = GatedDiagonal(np.zeros(k), _gate(k, sqrt, 1.0, -xi))
    dec1 = GatedMatrix(np.eye(k), _gate(k, sqrt, 1.0, -xi))
    dec2 = GatedMatrix(u * np.sqrt(lam), GateParams.zeros(d, GateActivation.IDENTITY))

    logger.debug(f"built rate-distortion construction for d={d}, k={k}, thresholds {lam}")
    return RDConstruction(enc1, enc2, cov, dec1, dec2, spectrum)


def rd_construct_verify(construction: RDConstruction, betas: Iterable[float]) -> Theorem1Errors:
    """Largest elementwise gap to :func:`optimal_params` over ``betas``."""
    k = construction.latent_dim
    worst = np.zeros(3)
    for beta in betas:
        got = construction.response(beta)
        want = optimal_params(construction.spectrum, beta, k)
        worst = np.maximum(
            worst,
            [
                np.max(np.abs(got.enc_weight - want.enc_weight)),
                np.max(np.abs(got.cov_diag - want.cov_diag)),
                np.max(np.abs(got.dec_weight - want.dec_weight)),
            ],
        )
    return Theorem1Errors(*(float(v) for v in worst))
