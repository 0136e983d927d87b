"""
Gate activations. Each maps the affine image of log beta to a per-unit scale.
"""

from enum import Enum

import numpy as np
from scipy.special import expit


class GateActivation(str, Enum):
    SIGMOID_ENCODER = "sigmoid"
    SQRT_EXP_DECODER = "sqrt_exp"
    FILM = "film"
    IDENTITY = "identity"


def activation_encoder(x):
    """Logistic sigmoid, in (0, 1)."""
    return expit(x)


def activation_decoder(x):
    """sqrt(relu(1 - exp(x))), in [0, 1); exactly 0 for x >= 0."""
    x = np.asarray(x, dtype=np.float64)
    return np.sqrt(-np.expm1(np.minimum(x, 0.0)))


def activate(kind: GateActivation, pre):
    pre = np.asarray(pre, dtype=np.float64)
    if kind is GateActivation.SIGMOID_ENCODER:
        return activation_encoder(pre)
    if kind is GateActivation.SQRT_EXP_DECODER:
        return activation_decoder(pre)
    if kind is GateActivation.FILM:
        return pre.copy()
    return np.ones_like(pre)


def activation_derivative(kind: GateActivation, pre, value):
    """d activation / d pre, given the already computed ``value``."""
    pre = np.asarray(pre, dtype=np.float64)
    if kind is GateActivation.SIGMOID_ENCODER:
        return value * (1.0 - value)
    if kind is GateActivation.SQRT_EXP_DECODER:
        out = np.zeros_like(pre)
        live = value > 0
        out[live] = -np.exp(pre[live]) / (2.0 * value[live])
        return out
    if kind is GateActivation.FILM:
        return np.ones_like(pre)
    return np.zeros_like(pre)
