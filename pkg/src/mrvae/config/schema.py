"""
Run configuration files.

A run file is YAML validated by the pydantic models below. Every model
rejects unknown keys.
"""

import hashlib
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from mrvae.core.exceptions import ConfigError

EXPERIMENTS = (
    "train-mrvae",
    "train-betavae",
    "sweep-rd",
    "verify-theorem1",
    "gradcheck",
    "linear-rd",
)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class BetaRange(StrictModel):
    a: float = 0.01
    b: float = 10.0

    @model_validator(mode="after")
    def _ordered(self):
        if not (0 < self.a < self.b):
            raise ValueError(f"beta range needs 0 < a < b, got ({self.a}, {self.b})")
        return self

    def as_tuple(self) -> Tuple[float, float]:
        return (self.a, self.b)


class ConstantSchedule(StrictModel):
    kind: Literal["constant"] = "constant"
    beta: float = Field(1.0, gt=0)


class LinearAnnealSchedule(StrictModel):
    kind: Literal["linear_anneal"] = "linear_anneal"
    beta_target: float = Field(1.0, gt=0)
    warmup_fraction: float = Field(0.3, gt=0, le=1)


Schedule = Annotated[Union[ConstantSchedule, LinearAnnealSchedule], Field(discriminator="kind")]


class TrainConfig(StrictModel):
    epochs: int = Field(20, gt=0)
    batch_size: int = Field(128, gt=0)
    learning_rate: float = Field(1e-3, ge=0)
    seed: int = Field(0, ge=0)
    beta_range: BetaRange = BetaRange()
    schedule: Optional[Schedule] = None
    beta_granularity: Literal["per_batch", "per_example"] = "per_batch"
    normalize_eta: bool = True
    lr_schedule: Literal["constant", "cosine"] = "constant"
    warmup_steps: int = Field(0, ge=0)


class ConvSpec(StrictModel):
    filters: int = Field(gt=0)
    kernel: int = Field(3, gt=0)
    stride: Literal[1, 2] = 1
    padding: int = Field(1, ge=0)


class ModelTopology(StrictModel):
    kind: Literal["deep", "linear"] = "deep"
    data_dim: int = Field(gt=0)
    latent_dim: int = Field(gt=0)
    encoder_hidden: List[int] = [512, 256]
    decoder_hidden: List[int] = [256, 512]
    nonlinearity: Literal["relu", "tanh", "identity"] = "relu"
    likelihood: Literal["bernoulli", "gaussian"] = "bernoulli"
    gated: bool = True
    encoder_gate: Literal["sigmoid", "sqrt_exp", "film", "identity"] = "sigmoid"
    decoder_gate: Literal["sigmoid", "sqrt_exp", "film", "identity"] = "sqrt_exp"
    gate_heads: bool = False
    input_shape: Optional[Tuple[int, int, int]] = None
    conv_layers: List[ConvSpec] = []
    linear_init: Literal["construction", "random"] = "construction"

    @field_validator("encoder_hidden", "decoder_hidden")
    @classmethod
    def _positive_widths(cls, widths):
        if any(w <= 0 for w in widths):
            raise ValueError("hidden widths must be positive")
        return widths

    @model_validator(mode="after")
    def _shapes(self):
        if self.input_shape is not None:
            c, h, w = self.input_shape
            if c * h * w != self.data_dim:
                raise ValueError(f"input_shape {self.input_shape} does not flatten to data_dim {self.data_dim}")
        if self.conv_layers and self.input_shape is None:
            raise ValueError("conv_layers require input_shape")
        if self.kind == "linear" and self.latent_dim > self.data_dim:
            raise ValueError("linear models need latent_dim <= data_dim")
        return self


class SyntheticGaussianSpec(StrictModel):
    kind: Literal["synthetic"] = "synthetic"
    dim: int = Field(gt=0)
    spectrum: List[float]
    n_samples: int = Field(gt=0)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _spectrum(self):
        if len(self.spectrum) != self.dim:
            raise ValueError(f"spectrum has {len(self.spectrum)} entries, expected {self.dim}")
        if any(s <= 0 for s in self.spectrum):
            raise ValueError("spectrum entries must be positive")
        if any(a < b for a, b in zip(self.spectrum, self.spectrum[1:])):
            raise ValueError("spectrum must be in descending order")
        return self


class IdxImagesSpec(StrictModel):
    kind: Literal["idx"] = "idx"
    path: str
    binarize_threshold: float = Field(0.5, ge=0, le=1)
    max_items: Optional[int] = Field(None, gt=0)


DatasetSpec = Annotated[Union[SyntheticGaussianSpec, IdxImagesSpec], Field(discriminator="kind")]


class SweepConfig(StrictModel):
    checkpoint: Optional[str] = None
    num_betas: int = Field(10, ge=2)
    beta_min: float = Field(0.01, gt=0)
    beta_max: float = Field(10.0, gt=0)
    mc_samples: int = Field(16, gt=0)
    noise_tol: float = Field(0.5, ge=0)
    au_threshold: float = Field(0.01, ge=0)
    workers: int = Field(1, gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.beta_min >= self.beta_max:
            raise ValueError("sweep needs beta_min < beta_max")
        return self


class Theorem1Config(StrictModel):
    data_dim: int = Field(8, gt=0)
    latent_dim: int = Field(4, gt=0)
    num_betas: int = Field(20, ge=1)
    beta_min: float = Field(0.01, gt=0)
    beta_max: float = Field(10.0, gt=0)
    limiting_bias: float = -50.0
    tolerance: float = Field(1e-9, gt=0)
    limiting_tolerance: float = Field(1e-8, gt=0)


class GradcheckConfig(StrictModel):
    data_dim: int = Field(20, gt=0)
    hidden: int = Field(16, gt=0)
    latent_dim: int = Field(4, gt=0)
    batch_size: int = Field(5, gt=0)
    step: float = Field(1e-5, gt=0)
    tolerance: float = Field(1e-5, gt=0)
    include_conv: bool = True


class RunConfig(StrictModel):
    experiment: Literal[EXPERIMENTS]
    train: TrainConfig = TrainConfig()
    dataset: Optional[DatasetSpec] = None
    model: Optional[ModelTopology] = None
    sweep: SweepConfig = SweepConfig()
    theorem1: Theorem1Config = Theorem1Config()
    gradcheck: GradcheckConfig = GradcheckConfig()
    out_dir: str = "out"

    @model_validator(mode="after")
    def _required_sections(self):
        if self.experiment in ("train-mrvae", "train-betavae", "sweep-rd", "linear-rd") and self.dataset is None:
            raise ValueError(f"{self.experiment} needs a dataset section")
        if self.experiment in ("train-mrvae", "train-betavae") and self.model is None:
            raise ValueError(f"{self.experiment} needs a model section")
        if self.experiment == "train-betavae" and self.train.schedule is None:
            raise ValueError("train-betavae needs train.schedule")
        if self.experiment == "sweep-rd" and self.sweep.checkpoint is None:
            raise ValueError("sweep-rd needs sweep.checkpoint")
        return self

    def with_overrides(self, seed: Optional[int] = None, out_dir: Optional[str] = None) -> "RunConfig":
        update = {}
        if seed is not None:
            update["train"] = self.train.model_copy(update={"seed": seed})
        if out_dir is not None:
            update["out_dir"] = out_dir
        return self.model_copy(update=update) if update else self


def parse_run_config(data, experiment: Optional[str] = None) -> RunConfig:
    """Validate a parsed run file; ``experiment`` fills in or must match its experiment key."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("run config must be a mapping at the top level")
    if experiment is not None:
        declared = data.setdefault("experiment", experiment)
        if declared != experiment:
            raise ConfigError(f"run config is for {declared!r}, not {experiment!r}")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid run config: {e}") from e


def load_run_config(path, experiment: Optional[str] = None) -> RunConfig:
    """Read and validate a YAML run file."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read run config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"run config {path} is not valid YAML: {e}") from e
    return parse_run_config(data, experiment)


def config_hash(config: BaseModel) -> str:
    return hashlib.sha256(config.model_dump_json().encode("utf-8")).hexdigest()
