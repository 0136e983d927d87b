from .config import get_runtime_config, print_config_help
from .schema import (
    BetaRange,
    ConstantSchedule,
    ConvSpec,
    GradcheckConfig,
    IdxImagesSpec,
    LinearAnnealSchedule,
    ModelTopology,
    RunConfig,
    SweepConfig,
    SyntheticGaussianSpec,
    Theorem1Config,
    TrainConfig,
    config_hash,
    load_run_config,
    parse_run_config,
)

__all__ = [
    "get_runtime_config",
    "print_config_help",
    "BetaRange",
    "ConstantSchedule",
    "ConvSpec",
    "GradcheckConfig",
    "IdxImagesSpec",
    "LinearAnnealSchedule",
    "ModelTopology",
    "RunConfig",
    "SweepConfig",
    "SyntheticGaussianSpec",
    "Theorem1Config",
    "TrainConfig",
    "config_hash",
    "load_run_config",
    "parse_run_config",
]
