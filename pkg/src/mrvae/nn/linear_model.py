"""
Two-layer gated linear VAE.

    E(beta) = E2(beta) E1(beta),  D(beta) = D2(beta) D1(beta),  C(beta) a GatedDiagonal

Each factor is a base matrix whose rows are scaled by a beta gate. A fresh
model puts square-root gates on E1, C and D1, so a latent unit can switch off
exactly (E row and D column zero, variance one) once beta passes its
threshold; E2 is sigmoid-gated and D2 ungated.

The loss on a batch is the exact expectation under q(z|x): the closed-form KL
plus the closed-form Gaussian reconstruction term against the batch moments,
so no sampling noise enters training.
"""

import copy
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from mrvae.analytic.linear_vae import (
    DatasetMoments,
    LinearVAEParams,
    distortion_closed_form,
    kl_closed_form,
    objective_gradients,
)
from mrvae.core.exceptions import ConfigError, DimensionError, DomainError
from mrvae.core.logging import get_logger
from mrvae.hypergate.activations import GateActivation
from mrvae.hypergate.conditioner import BetaConditioner
from mrvae.hypergate.gates import GateParams, gate_scale_backward, gate_terms
from mrvae.linalg.random import RngStream
from mrvae.nn.model import Likelihood, StepTerms, default_gate_bias

logger = get_logger(__name__)


@dataclass
class GatedMatrix:
    """A base matrix whose rows are scaled by a gate on eta."""

    base: np.ndarray
    gate: GateParams

    def value(self, eta) -> np.ndarray:
        return gate_terms(self.gate, eta).scale[:, None] * self.base

    def backward(self, eta, d_value: np.ndarray) -> Dict[str, np.ndarray]:
        scale = gate_terms(self.gate, eta).scale
        d_w, d_b, _ = gate_scale_backward(self.gate, eta, np.sum(d_value * self.base, axis=1))
        return {"base": scale[:, None] * d_value, "gate.w_hyper": d_w, "gate.b_hyper": d_b}

    def parameters(self) -> Dict[str, np.ndarray]:
        return {"base": self.base, "gate.w_hyper": self.gate.w_hyper, "gate.b_hyper": self.gate.b_hyper}


@dataclass
class GatedDiagonal:
    """Positive diagonal driven by a gate on eta.

    With a sigmoid gate the value is ``gate(eta) * exp(log_base)``. With a
    square-root gate it is ``(1 - gate(eta)**2) * exp(log_base)``, i.e.
    ``exp(log_base + min(pre, 0))``, which settles at its base value once the
    gate's affine image turns positive.
    """

    log_base: np.ndarray
    gate: GateParams

    @property
    def complement(self) -> bool:
        return self.gate.activation is GateActivation.SQRT_EXP_DECODER

    def value(self, eta) -> np.ndarray:
        terms = gate_terms(self.gate, eta)
        if self.complement:
            return np.exp(self.log_base + np.minimum(terms.pre, 0.0))
        return terms.scale * np.exp(self.log_base)

    def backward(self, eta, d_value: np.ndarray) -> Dict[str, np.ndarray]:
        if self.complement:
            pre = gate_terms(self.gate, eta).pre
            d_log = d_value * self.value(eta)
            d_pre = np.where(pre < 0.0, d_log, 0.0)
            return {"log_base": d_log, "gate.w_hyper": d_pre * eta, "gate.b_hyper": d_pre}
        scale = gate_terms(self.gate, eta).scale
        base = np.exp(self.log_base)
        d_w, d_b, _ = gate_scale_backward(self.gate, eta, d_value * base)
        return {"log_base": d_value * scale * base, "gate.w_hyper": d_w, "gate.b_hyper": d_b}

    def parameters(self) -> Dict[str, np.ndarray]:
        return {
            "log_base": self.log_base,
            "gate.w_hyper": self.gate.w_hyper,
            "gate.b_hyper": self.gate.b_hyper,
        }


def _gated(base: np.ndarray, kind: GateActivation) -> GatedMatrix:
    return GatedMatrix(
        np.asarray(base, dtype=np.float64),
        GateParams.zeros(base.shape[0], kind, bias=default_gate_bias(kind)),
    )


class LinearMRVAE:
    likelihood = Likelihood.GAUSSIAN_UNIT_VAR

    def __init__(
        self,
        enc1: GatedMatrix,
        enc2: GatedMatrix,
        cov: GatedDiagonal,
        dec1: GatedMatrix,
        dec2: GatedMatrix,
        mean: np.ndarray,
        conditioner: Optional[BetaConditioner] = None,
    ):
        self.enc1, self.enc2, self.cov, self.dec1, self.dec2 = enc1, enc2, cov, dec1, dec2
        self.mean = np.asarray(mean, dtype=np.float64)
        self.conditioner = conditioner or BetaConditioner()
        k, d = enc2.base.shape[0], enc1.base.shape[1]
        if dec2.base.shape[0] != d or dec1.base.shape[1] != k or cov.log_base.shape != (k,):
            raise DimensionError("linear model factors have inconsistent shapes")

    @classmethod
    def init(
        cls,
        rng: RngStream,
        data_dim: int,
        latent_dim: int,
        mean: np.ndarray,
        conditioner: Optional[BetaConditioner] = None,
        init_scale: float = 0.1,
    ) -> "LinearMRVAE":
        d, k = data_dim, latent_dim
        sig, sqrt = GateActivation.SIGMOID_ENCODER, GateActivation.SQRT_EXP_DECODER
        logger.debug(f"initializing gated linear model d={d}, k={k}")
        return cls(
            enc1=_gated(init_scale * rng.standard_normal((k, d)), sqrt),
            enc2=_gated(np.eye(k) + init_scale * rng.standard_normal((k, k)), sig),
            cov=GatedDiagonal(np.zeros(k), GateParams.zeros(k, sqrt, bias=default_gate_bias(sqrt))),
            dec1=_gated(np.eye(k) + init_scale * rng.standard_normal((k, k)), sqrt),
            dec2=_gated(init_scale * rng.standard_normal((d, k)), GateActivation.IDENTITY),
            mean=mean,
            conditioner=conditioner,
        )

    @classmethod
    def from_construction(
        cls, construction, mean: Optional[np.ndarray] = None, beta_range=(0.01, 10.0)
    ) -> "LinearMRVAE":
        """Start from the constructive hypernetwork; inputs are raw log beta."""
        d = construction.spectrum.source_dim
        return cls(
            enc1=copy.deepcopy(construction.enc1),
            enc2=copy.deepcopy(construction.enc2),
            cov=copy.deepcopy(construction.cov),
            dec1=copy.deepcopy(construction.dec1),
            dec2=copy.deepcopy(construction.dec2),
            mean=np.zeros(d) if mean is None else mean,
            conditioner=BetaConditioner(beta_range[0], beta_range[1], enabled=False),
        )

    @property
    def latent_dim(self) -> int:
        return int(self.enc2.base.shape[0])

    @property
    def data_dim(self) -> int:
        return int(self.enc1.base.shape[1])

    @property
    def gated(self) -> bool:
        return True

    def _eta(self, beta):
        beta = np.asarray(beta, dtype=np.float64)
        if beta.ndim != 0:
            raise ConfigError("the linear model takes one beta per batch")
        if beta <= 0:
            raise DomainError("beta must be positive")
        return self.conditioner.normalize(np.log(beta))

    def named_parts(self):
        return [
            ("enc1", self.enc1),
            ("enc2", self.enc2),
            ("cov", self.cov),
            ("dec1", self.dec1),
            ("dec2", self.dec2),
        ]

    def parameters(self) -> Dict[str, np.ndarray]:
        params = {}
        for prefix, part in self.named_parts():
            for key, value in part.parameters().items():
                params[f"{prefix}.{key}"] = value
        return params

    def response(self, beta) -> LinearVAEParams:
        """(E, C, D) produced by the hypernetwork at ``beta``."""
        eta = self._eta(beta)
        return LinearVAEParams(
            enc_weight=self.enc2.value(eta) @ self.enc1.value(eta),
            cov_diag=self.cov.value(eta),
            dec_weight=self.dec2.value(eta) @ self.dec1.value(eta),
            mean=self.mean,
        )

    def encode(self, x, beta):
        params = self.response(beta)
        x = np.asarray(x, dtype=np.float64)
        z_mean = (x - self.mean) @ params.enc_weight.T
        z_logvar = np.broadcast_to(np.log(params.cov_diag), z_mean.shape).copy()
        return z_mean, z_logvar

    def decode(self, z, beta):
        params = self.response(beta)
        return np.asarray(z, dtype=np.float64) @ params.dec_weight.T + self.mean

    def loss_and_grads(self, x, beta, rng: Optional[RngStream] = None):
        """Exact expected loss on the batch and its gradients; ``rng`` is unused."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.data_dim:
            raise DimensionError(f"expected inputs of shape (n, {self.data_dim}), got {x.shape}")
        eta = self._eta(beta)
        beta = float(beta)
        moments = DatasetMoments.from_data(x)

        e1, e2 = self.enc1.value(eta), self.enc2.value(eta)
        d1, d2 = self.dec1.value(eta), self.dec2.value(eta)
        params = LinearVAEParams(e2 @ e1, self.cov.value(eta), d2 @ d1, self.mean)

        rate = kl_closed_form(params, moments)
        distortion = distortion_closed_form(params, moments)
        d_e, d_c, d_d = objective_gradients(params, moments, beta, total=False)

        grads = {}
        for prefix, part, d_value in (
            ("enc1", self.enc1, e2.T @ d_e),
            ("enc2", self.enc2, d_e @ e1.T),
            ("cov", self.cov, d_c),
            ("dec1", self.dec1, d2.T @ d_d),
            ("dec2", self.dec2, d_d @ d1.T),
        ):
            for key, value in part.backward(eta, d_value).items():
                grads[f"{prefix}.{key}"] = value
        return StepTerms(distortion + beta * rate, rate, distortion), grads
