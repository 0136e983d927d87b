"""
Training loops.

``mrvae_train`` samples beta log-uniformly at every step so one set of
hypernetwork weights covers the whole range. ``betavae_train`` is the
single-beta baseline driven by a schedule. Both share the epoch loop, the
Adam optimizer and the per-epoch telemetry.
"""

from dataclasses import asdict, dataclass, field
from typing import Callable, List, NamedTuple, Optional

import numpy as np

from mrvae.config.schema import BetaRange, TrainConfig
from mrvae.core.exceptions import DomainError, NumericalError, StateError
from mrvae.core.logging import get_logger
from mrvae.core.session import log_metrics
from mrvae.linalg.random import RngStream
from mrvae.nn.optim import AdamState, adam_step, cosine_lr
from mrvae.training.sampling import sample_beta
from mrvae.training.schedule import beta_at

logger = get_logger(__name__)


class StepResult(NamedTuple):
    loss: float
    rate: float
    distortion: float
    beta_used: np.ndarray


@dataclass
class HistoryRow:
    step: int
    epoch: int
    beta: float
    loss: float
    rate: float
    distortion: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainResult:
    model: object
    optimizer: AdamState
    history: List[HistoryRow] = field(default_factory=list)
    step: int = 0


def apply_update(model, batch, beta, noise_rng: RngStream, adam: AdamState, lr: Optional[float] = None) -> StepResult:
    terms, grads = model.loss_and_grads(batch, beta, noise_rng)
    if not np.isfinite(terms.loss):
        raise NumericalError("non-finite loss")
    adam_step(adam, model.parameters(), grads, lr)
    return StepResult(terms.loss, terms.rate, terms.distortion, np.asarray(beta))


def mrvae_train_step(
    model,
    batch,
    beta_range: BetaRange,
    rng: RngStream,
    adam: AdamState,
    granularity: str = "per_batch",
    lr: Optional[float] = None,
    noise_rng: Optional[RngStream] = None,
) -> StepResult:
    """Sample beta, take the loss ``D + beta R`` and apply one Adam update.

    ``rng`` draws beta; reparameterization noise comes from ``noise_rng``
    when given, else from ``rng`` as well.
    """
    if not model.gated:
        raise StateError("multi-rate training needs a gated model")
    size = None if granularity == "per_batch" else np.asarray(batch).shape[0]
    beta = sample_beta(beta_range, rng, size)
    return apply_update(model, batch, beta, noise_rng or rng, adam, lr)


def _batches(n: int, batch_size: int, rng: RngStream):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def _run(
    model,
    data: np.ndarray,
    config: TrainConfig,
    rng: RngStream,
    step_fn: Callable[[np.ndarray, int, Optional[float]], StepResult],
    label: str,
    adam: Optional[AdamState] = None,
    start_step: int = 0,
) -> TrainResult:
    data = np.asarray(data, dtype=np.float64)
    n = data.shape[0]
    if n == 0:
        raise DomainError("cannot train on an empty dataset")
    adam = adam or AdamState(lr=config.learning_rate)
    shuffle_rng = rng.split("shuffle")
    steps_per_epoch = -(-n // config.batch_size)
    total = config.epochs * steps_per_epoch
    result = TrainResult(model, adam, step=start_step)

    logger.info(f"{label}: {n} examples, {config.epochs} epochs, {steps_per_epoch} steps per epoch")
    for epoch in range(config.epochs):
        sums = np.zeros(4)
        for batch_index, idx in enumerate(_batches(n, config.batch_size, shuffle_rng)):
            lr = None
            if config.lr_schedule == "cosine":
                lr = cosine_lr(result.step, total, config.learning_rate, config.warmup_steps)
            try:
                out = step_fn(data[idx], result.step + 1, lr)
            except NumericalError as e:
                logger.error(f"{label}: numerical failure in epoch {epoch}, batch {batch_index}: {e}")
                if e.batch_index is None:
                    raise NumericalError(str(e), batch_index=batch_index) from e
                raise
            result.step += 1
            beta_mean = float(np.mean(out.beta_used))
            result.history.append(
                HistoryRow(result.step, epoch, beta_mean, out.loss, out.rate, out.distortion)
            )
            sums += (out.loss, out.rate, out.distortion, beta_mean)

        mean = sums / steps_per_epoch
        row = {
            "epoch": epoch,
            "loss": mean[0],
            "rate": mean[1],
            "distortion": mean[2],
            "beta_mean": mean[3],
        }
        logger.info(
            f"{label} epoch {epoch}: loss={mean[0]:.4f} rate={mean[1]:.4f} "
            f"distortion={mean[2]:.4f} beta_mean={mean[3]:.4f}"
        )
        log_metrics(row)
    return result


def mrvae_train(
    model,
    data,
    config: TrainConfig,
    rng: Optional[RngStream] = None,
    adam: Optional[AdamState] = None,
) -> TrainResult:
    """Train a gated model with beta drawn from ``config.beta_range`` at every step."""
    rng = rng or RngStream(config.seed)
    beta_rng = rng.split("beta")
    noise_rng = rng.split("noise")
    adam = adam or AdamState(lr=config.learning_rate)

    def step(batch, _step, lr):
        return mrvae_train_step(
            model, batch, config.beta_range, beta_rng, adam, config.beta_granularity, lr, noise_rng
        )

    return _run(model, data, config, rng, step, "mrvae", adam)


def betavae_train(model, data, schedule, config: TrainConfig, rng: Optional[RngStream] = None) -> TrainResult:
    """Train at the schedule's beta; history rows record (step, beta, rate, distortion)."""
    rng = rng or RngStream(config.seed)
    noise_rng = rng.split("noise")
    n = np.asarray(data).shape[0]
    total = config.epochs * max(1, -(-n // config.batch_size))
    adam = AdamState(lr=config.learning_rate)

    def step(batch, step_number, lr):
        beta = beta_at(schedule, step_number, total)
        return apply_update(model, batch, beta, noise_rng, adam, lr)

    return _run(model, data, config, rng, step, "betavae", adam)
