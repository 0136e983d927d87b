"""
Dense and convolutional layers with optional beta gates and hand-written
backward passes. Gates multiply the pre-activation before the nonlinearity.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from mrvae.core.exceptions import DimensionError
from mrvae.hypergate.gates import (
    GateParams,
    conv_gate,
    conv_gate_backward,
    gate_backward,
    gate_terms,
)
from mrvae.linalg.random import RngStream


class Nonlinearity(str, Enum):
    RELU = "relu"
    TANH = "tanh"
    IDENTITY = "identity"


def _activate(kind: Nonlinearity, z: np.ndarray) -> np.ndarray:
    if kind is Nonlinearity.RELU:
        return np.maximum(z, 0.0)
    if kind is Nonlinearity.TANH:
        return np.tanh(z)
    return z


def _activate_backward(kind: Nonlinearity, z: np.ndarray, out: np.ndarray, d_out: np.ndarray):
    if kind is Nonlinearity.RELU:
        return d_out * (z > 0)
    if kind is Nonlinearity.TANH:
        return d_out * (1.0 - out * out)
    return d_out


def _gate_grads(prefix: str, gg) -> Dict[str, np.ndarray]:
    grads = {f"{prefix}w_hyper": gg.d_w_hyper, f"{prefix}b_hyper": gg.d_b_hyper}
    if gg.d_shift_hyper is not None:
        grads[f"{prefix}shift_hyper"] = gg.d_shift_hyper
    return grads


def kaiming_uniform(rng: RngStream, shape, fan_in: int) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)


@dataclass
class DenseCache:
    a: np.ndarray
    s: np.ndarray
    z: np.ndarray
    out: np.ndarray
    eta: object


class DenseLayer:
    """``act(gate(eta) * (a W^T + b))`` for a batch ``a`` of shape (n, m_in)."""

    kind = "dense"

    def __init__(
        self,
        w_base: np.ndarray,
        b_base: np.ndarray,
        nonlinearity: Nonlinearity = Nonlinearity.IDENTITY,
        gate: Optional[GateParams] = None,
    ):
        self.w_base = np.asarray(w_base, dtype=np.float64)
        self.b_base = np.asarray(b_base, dtype=np.float64)
        self.nonlinearity = Nonlinearity(nonlinearity)
        self.gate = gate
        m_out = self.w_base.shape[0]
        if self.b_base.shape != (m_out,):
            raise DimensionError(f"bias shape {self.b_base.shape} does not match {m_out} rows")
        if gate is not None and gate.size != m_out:
            raise DimensionError(f"gate length {gate.size} does not match {m_out} outputs")

    @classmethod
    def init(
        cls,
        rng: RngStream,
        m_in: int,
        m_out: int,
        nonlinearity: Nonlinearity = Nonlinearity.IDENTITY,
        gate: Optional[GateParams] = None,
    ) -> "DenseLayer":
        bound = 1.0 / np.sqrt(m_in)
        return cls(
            kaiming_uniform(rng, (m_out, m_in), m_in),
            rng.uniform(-bound, bound, size=m_out),
            nonlinearity,
            gate,
        )

    @property
    def out_size(self) -> int:
        return int(self.w_base.shape[0])

    @property
    def in_size(self) -> int:
        return int(self.w_base.shape[1])

    def parameters(self) -> Dict[str, np.ndarray]:
        params = {"W": self.w_base, "b": self.b_base}
        if self.gate is not None:
            params.update({f"gate.{k}": v for k, v in self.gate.arrays().items()})
        return params

    def base_count(self) -> int:
        return int(self.w_base.size + self.b_base.size)

    def forward(self, a: np.ndarray, eta) -> Tuple[np.ndarray, DenseCache]:
        if a.shape[-1] != self.in_size:
            raise DimensionError(f"dense layer expects width {self.in_size}, got {a.shape[-1]}")
        s = a @ self.w_base.T + self.b_base
        if self.gate is None:
            z = s
        else:
            terms = gate_terms(self.gate, eta)
            z = terms.scale * s
            if terms.shift is not None:
                z = z + terms.shift
        out = _activate(self.nonlinearity, z)
        return out, DenseCache(a, s, z, out, eta)

    def backward(self, cache: DenseCache, d_out: np.ndarray):
        dz = _activate_backward(self.nonlinearity, cache.z, cache.out, d_out)
        grads = {}
        if self.gate is None:
            ds = dz
        else:
            gg = gate_backward(self.gate, cache.eta, cache.s, dz)
            ds = gg.d_s
            grads.update(_gate_grads("gate.", gg))
        grads["W"] = ds.T @ cache.a
        grads["b"] = ds.sum(axis=0)
        return ds @ self.w_base, grads


@dataclass
class ConvCache:
    cols: np.ndarray
    in_shape: Tuple[int, ...]
    s: np.ndarray
    z: np.ndarray
    out: np.ndarray
    eta: object


class ConvLayer:
    """Square-kernel 2-D convolution lowered to a matrix product (im2col).

    Input and output are (n, C, H, W). Each filter's output map is gated by
    one scalar per channel.
    """

    kind = "conv"

    def __init__(
        self,
        weight: np.ndarray,
        bias: np.ndarray,
        stride: int = 1,
        padding: int = 0,
        nonlinearity: Nonlinearity = Nonlinearity.RELU,
        gate: Optional[GateParams] = None,
    ):
        self.weight = np.asarray(weight, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        if self.weight.ndim != 4 or self.weight.shape[2] != self.weight.shape[3]:
            raise DimensionError(f"conv weight must be (C_out, C_in, K, K), got {self.weight.shape}")
        if stride not in (1, 2):
            raise DimensionError(f"stride must be 1 or 2, got {stride}")
        self.stride = stride
        self.padding = padding
        self.nonlinearity = Nonlinearity(nonlinearity)
        self.gate = gate
        if self.bias.shape != (self.filters,):
            raise DimensionError("conv bias must have one entry per filter")
        if gate is not None and gate.size != self.filters:
            raise DimensionError(f"gate length {gate.size} does not match {self.filters} filters")

    @classmethod
    def init(
        cls,
        rng: RngStream,
        in_channels: int,
        filters: int,
        kernel: int,
        stride: int = 1,
        padding: int = 0,
        nonlinearity: Nonlinearity = Nonlinearity.RELU,
        gate: Optional[GateParams] = None,
    ) -> "ConvLayer":
        fan_in = in_channels * kernel * kernel
        bound = 1.0 / np.sqrt(fan_in)
        return cls(
            kaiming_uniform(rng, (filters, in_channels, kernel, kernel), fan_in),
            rng.uniform(-bound, bound, size=filters),
            stride,
            padding,
            nonlinearity,
            gate,
        )

    @property
    def filters(self) -> int:
        return int(self.weight.shape[0])

    @property
    def kernel(self) -> int:
        return int(self.weight.shape[2])

    def output_shape(self, in_shape: Tuple[int, int, int]) -> Tuple[int, int, int]:
        _, h, w = in_shape
        ho = (h + 2 * self.padding - self.kernel) // self.stride + 1
        wo = (w + 2 * self.padding - self.kernel) // self.stride + 1
        if ho <= 0 or wo <= 0:
            raise DimensionError(f"conv output for input {in_shape} would be empty")
        return self.filters, ho, wo

    def parameters(self) -> Dict[str, np.ndarray]:
        params = {"W": self.weight, "b": self.bias}
        if self.gate is not None:
            params.update({f"gate.{k}": v for k, v in self.gate.arrays().items()})
        return params

    def base_count(self) -> int:
        return int(self.weight.size + self.bias.size)

    def _im2col(self, a: np.ndarray):
        p, k, st = self.padding, self.kernel, self.stride
        padded = np.pad(a, ((0, 0), (0, 0), (p, p), (p, p))) if p else a
        windows = sliding_window_view(padded, (k, k), axis=(2, 3))[:, :, ::st, ::st]
        n, c, ho, wo = windows.shape[:4]
        cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, c * k * k)
        return cols, ho, wo

    def forward(self, a: np.ndarray, eta) -> Tuple[np.ndarray, ConvCache]:
        if a.ndim != 4 or a.shape[1] != self.weight.shape[1]:
            raise DimensionError(
                f"conv layer expects (n, {self.weight.shape[1]}, H, W), got {a.shape}"
            )
        n = a.shape[0]
        cols, ho, wo = self._im2col(a)
        s = cols @ self.weight.reshape(self.filters, -1).T + self.bias
        s = s.reshape(n, ho, wo, self.filters).transpose(0, 3, 1, 2)
        z = s if self.gate is None else conv_gate(self.gate, eta, s)
        out = _activate(self.nonlinearity, z)
        return out, ConvCache(cols, a.shape, s, z, out, eta)

    def backward(self, cache: ConvCache, d_out: np.ndarray):
        dz = _activate_backward(self.nonlinearity, cache.z, cache.out, d_out)
        grads = {}
        if self.gate is None:
            ds = dz
        else:
            gg = conv_gate_backward(self.gate, cache.eta, cache.s, dz)
            ds = gg.d_s
            grads.update(_gate_grads("gate.", gg))

        n, c_out, ho, wo = ds.shape
        ds_mat = ds.transpose(0, 2, 3, 1).reshape(n * ho * wo, c_out)
        w_mat = self.weight.reshape(c_out, -1)
        grads["W"] = (ds_mat.T @ cache.cols).reshape(self.weight.shape)
        grads["b"] = ds_mat.sum(axis=0)

        _, c_in, h, w = cache.in_shape
        k, st, p = self.kernel, self.stride, self.padding
        d_cols = (ds_mat @ w_mat).reshape(n, ho, wo, c_in, k, k)
        d_padded = np.zeros((n, c_in, h + 2 * p, w + 2 * p))
        for ki in range(k):
            for kj in range(k):
                d_padded[:, :, ki : ki + st * ho : st, kj : kj + st * wo : st] += d_cols[
                    :, :, :, :, ki, kj
                ].transpose(0, 3, 1, 2)
        d_a = d_padded[:, :, p : p + h, p : p + w] if p else d_padded
        return d_a, grads
