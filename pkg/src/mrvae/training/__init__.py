from .loop import (
    HistoryRow,
    StepResult,
    TrainResult,
    betavae_train,
    mrvae_train,
    mrvae_train_step,
)
from .sampling import conditioner_for, normalize_eta, sample_beta, sample_eta
from .schedule import beta_at, warmup_steps

__all__ = [
    "HistoryRow",
    "StepResult",
    "TrainResult",
    "betavae_train",
    "mrvae_train",
    "mrvae_train_step",
    "conditioner_for",
    "normalize_eta",
    "sample_beta",
    "sample_eta",
    "beta_at",
    "warmup_steps",
]
