"""
Adam with bias correction, plus the learning-rate schedules used in training.
"""

import math
from typing import Dict, Optional

import numpy as np

from mrvae.core.exceptions import DimensionError, StateError


class AdamState:
    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        self.t = 0

    def state_dict(self) -> dict:
        return {
            "hyper": {"lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "epsilon": self.epsilon, "t": self.t},
            "m": dict(self.m),
            "v": dict(self.v),
        }

    @classmethod
    def from_state_dict(cls, state: dict) -> "AdamState":
        hyper = state["hyper"]
        opt = cls(hyper["lr"], hyper["beta1"], hyper["beta2"], hyper["epsilon"])
        opt.t = int(hyper["t"])
        opt.m = {k: np.array(v, dtype=np.float64) for k, v in state["m"].items()}
        opt.v = {k: np.array(v, dtype=np.float64) for k, v in state["v"].items()}
        return opt


def adam_step(
    state: AdamState,
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    lr: Optional[float] = None,
) -> Dict[str, np.ndarray]:
    """One bias-corrected Adam update, applied to ``params`` in place."""
    missing = set(params) - set(grads)
    if missing:
        raise StateError(f"no gradient for parameters: {sorted(missing)}")
    lr = state.lr if lr is None else lr
    state.t += 1

    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    step_size = lr / bc1

    for k in params:
        g = grads[k]
        if np.shape(g) != params[k].shape:
            raise DimensionError(f"gradient for {k} has shape {np.shape(g)}, expected {params[k].shape}")

        if k not in state.m:
            state.m[k] = np.zeros_like(params[k])
            state.v[k] = np.zeros_like(params[k])

        state.m[k] *= state.beta1
        state.m[k] += (1.0 - state.beta1) * g

        state.v[k] *= state.beta2
        state.v[k] += (1.0 - state.beta2) * (g * g)

        denom = np.sqrt(state.v[k] * (1.0 / bc2)) + state.epsilon
        params[k] -= step_size * state.m[k] / denom
    return params


def cosine_lr(step: int, total_steps: int, base_lr: float, warmup_steps: int = 0) -> float:
    """Linear warmup followed by cosine decay to zero."""
    if warmup_steps and step < warmup_steps:
        return base_lr * (step + 1) / warmup_steps
    span = max(1, total_steps - warmup_steps)
    progress = min(1.0, (step - warmup_steps) / span)
    return 0.5 * base_lr * (1.0 + math.cos(math.pi * progress))
