"""
Per-unit gates conditioned on log beta.

A gate scales row i of a layer's weight and entry i of its bias by
``act(w_hyper[i] * eta + b_hyper[i])``. The same scale applied to the
pre-activation ``W a + b`` gives identical outputs, which is how layers use
it. ``eta`` is either a scalar or one value per example; in the latter case
gates carry a leading batch axis.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from mrvae.core.exceptions import DimensionError
from mrvae.hypergate.activations import GateActivation, activate, activation_derivative
from mrvae.linalg.types import DenseMatrix, DenseVector


@dataclass
class GateParams:
    w_hyper: DenseVector
    b_hyper: DenseVector
    activation: GateActivation
    shift_hyper: Optional[DenseVector] = field(default=None)

    def __post_init__(self):
        self.w_hyper = np.asarray(self.w_hyper, dtype=np.float64)
        self.b_hyper = np.asarray(self.b_hyper, dtype=np.float64)
        self.activation = GateActivation(self.activation)
        if self.w_hyper.shape != self.b_hyper.shape or self.w_hyper.ndim != 1:
            raise DimensionError("w_hyper and b_hyper must be vectors of equal length")
        if self.activation is GateActivation.FILM and self.shift_hyper is None:
            self.shift_hyper = np.zeros_like(self.w_hyper)
        if self.shift_hyper is not None:
            self.shift_hyper = np.asarray(self.shift_hyper, dtype=np.float64)
            if self.shift_hyper.shape != self.w_hyper.shape:
                raise DimensionError("shift_hyper must match w_hyper")

    @property
    def size(self) -> int:
        return int(self.w_hyper.size)

    @property
    def num_params(self) -> int:
        extra = self.size if self.shift_hyper is not None else 0
        return 2 * self.size + extra

    @classmethod
    def zeros(cls, size: int, activation: GateActivation, bias: float = 0.0) -> "GateParams":
        return cls(
            w_hyper=np.zeros(size),
            b_hyper=np.full(size, float(bias)),
            activation=activation,
        )

    def arrays(self) -> dict:
        out = {"w_hyper": self.w_hyper, "b_hyper": self.b_hyper}
        if self.shift_hyper is not None:
            out["shift_hyper"] = self.shift_hyper
        return out


class GateTerms(NamedTuple):
    pre: np.ndarray
    scale: np.ndarray
    shift: Optional[np.ndarray]


class GateGrads(NamedTuple):
    d_w_hyper: DenseVector
    d_b_hyper: DenseVector
    d_s: np.ndarray
    d_shift_hyper: Optional[DenseVector] = None


def _eta_column(eta) -> np.ndarray:
    """Scalar eta stays 0-d; per-example eta becomes a column so it broadcasts over units."""
    eta = np.asarray(eta, dtype=np.float64)
    return eta if eta.ndim == 0 else eta[:, None]


def gate_terms(gp: GateParams, eta_norm) -> GateTerms:
    col = _eta_column(eta_norm)
    pre = col * gp.w_hyper + gp.b_hyper
    scale = activate(gp.activation, pre)
    shift = None
    if gp.activation is GateActivation.FILM:
        shift = col * gp.shift_hyper
    return GateTerms(pre=pre, scale=scale, shift=shift)


def gate_vector(gp: GateParams, eta_norm):
    """The gate for one eta; FiLM gates return ``(scale, shift)``."""
    terms = gate_terms(gp, eta_norm)
    if gp.activation is GateActivation.FILM:
        return terms.scale, terms.shift
    return terms.scale


def effective_weight(
    gp: GateParams, eta_norm: float, w_base: DenseMatrix, b_base: DenseVector
) -> Tuple[DenseMatrix, DenseVector]:
    """Row-scaled weight and scaled bias; a FiLM shift is folded into the bias."""
    w_base = np.asarray(w_base, dtype=np.float64)
    b_base = np.asarray(b_base, dtype=np.float64)
    if np.ndim(eta_norm) != 0:
        raise DimensionError("effective_weight takes a single eta")
    if w_base.shape[0] != gp.size or b_base.shape != (gp.size,):
        raise DimensionError(
            f"gate length {gp.size} does not match weight {w_base.shape} / bias {b_base.shape}"
        )
    terms = gate_terms(gp, eta_norm)
    w = terms.scale[:, None] * w_base
    b = terms.scale * b_base
    if terms.shift is not None:
        b = b + terms.shift
    return w, b


def apply_gate_preactivation(gate, s, shift=None):
    """``gate * s`` (plus ``shift`` for FiLM) along the last axis."""
    gate = np.asarray(gate, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if gate.shape[-1] != s.shape[-1]:
        raise DimensionError(f"gate length {gate.shape[-1]} does not match {s.shape[-1]}")
    out = gate * s
    if shift is not None:
        out = out + shift
    return out


def _channel_view(arr: np.ndarray, spatial_ndim: int) -> np.ndarray:
    return arr.reshape(arr.shape + (1,) * spatial_ndim)


def conv_gate(gp: GateParams, eta_norm, channel_preacts):
    """Scale each output channel's spatial map by its gate.

    ``channel_preacts`` is (C, H, W) or (n, C, H, W).
    """
    s = np.asarray(channel_preacts, dtype=np.float64)
    channel_axis = s.ndim - 3
    if s.ndim not in (3, 4) or s.shape[channel_axis] != gp.size:
        raise DimensionError(
            f"conv gate of length {gp.size} does not match pre-activations {s.shape}"
        )
    terms = gate_terms(gp, eta_norm)
    out = s * _channel_view(terms.scale, 2)
    if terms.shift is not None:
        out = out + _channel_view(terms.shift, 2)
    return out


def _affine_backward(gp: GateParams, eta_norm, terms: GateTerms, d_scale, d_shift):
    d_pre = d_scale * activation_derivative(gp.activation, terms.pre, terms.scale)
    col = _eta_column(eta_norm)
    batch_axes = tuple(range(d_pre.ndim - 1))
    d_w = np.sum(d_pre * col, axis=batch_axes)
    d_b = np.sum(d_pre, axis=batch_axes)
    d_shift_hyper = None
    if gp.shift_hyper is not None:
        d_shift_hyper = (
            np.zeros_like(gp.shift_hyper)
            if d_shift is None
            else np.sum(d_shift * col, axis=tuple(range(d_shift.ndim - 1)))
        )
    return d_w, d_b, d_shift_hyper


def _reduce_to(arr: np.ndarray, shape) -> np.ndarray:
    """Sum leading axes of ``arr`` until it has ``shape``."""
    while arr.ndim > len(shape):
        arr = arr.sum(axis=0)
    return arr


def gate_scale_backward(gp: GateParams, eta_norm, d_scale, d_shift=None):
    """Hyper-parameter gradients from an upstream gradient on the gate itself."""
    terms = gate_terms(gp, eta_norm)
    d_scale = _reduce_to(np.asarray(d_scale, dtype=np.float64), terms.scale.shape)
    if d_shift is not None:
        d_shift = _reduce_to(np.asarray(d_shift, dtype=np.float64), terms.scale.shape)
    return _affine_backward(gp, eta_norm, terms, d_scale, d_shift)


def gate_backward(gp: GateParams, eta_norm, s, upstream) -> GateGrads:
    """Gradients through ``gate * s (+ shift)`` for dense pre-activations.

    ``s`` and ``upstream`` are (m,) or (n, m).
    """
    s = np.asarray(s, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    if s.shape != upstream.shape or s.shape[-1] != gp.size:
        raise DimensionError(f"shapes {s.shape} / {upstream.shape} do not match gate {gp.size}")
    terms = gate_terms(gp, eta_norm)
    d_s = terms.scale * upstream
    d_scale = _reduce_to(s * upstream, terms.scale.shape)
    d_shift = _reduce_to(upstream, terms.scale.shape) if terms.shift is not None else None
    d_w, d_b, d_shift_hyper = _affine_backward(gp, eta_norm, terms, d_scale, d_shift)
    return GateGrads(d_w, d_b, d_s, d_shift_hyper)


def conv_gate_backward(gp: GateParams, eta_norm, s, upstream) -> GateGrads:
    """Gradients through :func:`conv_gate` for (n, C, H, W) pre-activations."""
    s = np.asarray(s, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    terms = gate_terms(gp, eta_norm)
    d_s = upstream * _channel_view(terms.scale, 2)
    d_scale = _reduce_to((s * upstream).sum(axis=(-2, -1)), terms.scale.shape)
    d_shift = None
    if terms.shift is not None:
        d_shift = _reduce_to(upstream.sum(axis=(-2, -1)), terms.scale.shape)
    d_w, d_b, d_shift_hyper = _affine_backward(gp, eta_norm, terms, d_scale, d_shift)
    return GateGrads(d_w, d_b, d_s, d_shift_hyper)
