"""
Central finite-difference checks of the hand-written gradients.
"""

from typing import Dict, NamedTuple, Optional

import numpy as np

from mrvae.core.logging import get_logger
from mrvae.linalg.random import RngStream

logger = get_logger(__name__)

DENOM_FLOOR = 1e-3


class GradcheckReport(NamedTuple):
    max_rel_error: Dict[str, float]
    tolerance: float

    @property
    def worst(self) -> float:
        return max(self.max_rel_error.values(), default=0.0)

    @property
    def ok(self) -> bool:
        return self.worst <= self.tolerance

    def failures(self) -> Dict[str, float]:
        return {k: v for k, v in self.max_rel_error.items() if v > self.tolerance}


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    return np.abs(analytic - numeric) / np.maximum(np.abs(analytic) + np.abs(numeric), DENOM_FLOOR)


def perturb_gates(model, rng: RngStream, scale: float = 0.05) -> None:
    """Move every gate off its beta-independent initial value, in place.

    Offsets are small so square-root gates stay below their kink at zero.
    """
    for name, value in model.parameters().items():
        if ".gate." in name:
            value += scale * rng.uniform(-1.0, 1.0, value.shape)


def finite_difference_check(
    model,
    x,
    beta,
    seed: int = 0,
    step: float = 1e-5,
    tolerance: float = 1e-5,
    max_entries: Optional[int] = None,
) -> GradcheckReport:
    """Compare ``loss_and_grads`` against central differences of the loss.

    Reparameterization noise is replayed from ``seed`` on every evaluation,
    so the loss is a deterministic function of the parameters.
    """
    params = model.parameters()
    _, grads = model.loss_and_grads(x, beta, RngStream(seed))
    pick_rng = RngStream(seed).split("gradcheck")

    def loss() -> float:
        return model.loss_and_grads(x, beta, RngStream(seed))[0].loss

    report = {}
    for name, value in params.items():
        flat = value.reshape(-1)
        indices = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            indices = np.sort(pick_rng.permutation(flat.size)[:max_entries])
        analytic = grads[name].reshape(-1)[indices]
        numeric = np.empty(indices.size)
        for j, idx in enumerate(indices):
            orig = flat[idx]
            flat[idx] = orig + step
            up = loss()
            flat[idx] = orig - step
            down = loss()
            flat[idx] = orig
            numeric[j] = (up - down) / (2.0 * step)
        err = float(np.max(relative_error(analytic, numeric))) if indices.size else 0.0
        report[name] = err
        logger.debug(f"gradcheck {name}: max relative error {err:.3e}")
    return GradcheckReport(report, tolerance)
