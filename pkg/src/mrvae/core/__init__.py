# __init__.py

from .logging import get_logger, set_run_context, setup_logging
from .exceptions import (
    ConfigError,
    ConstructionError,
    DimensionError,
    DomainError,
    FormatError,
    MRVAEError,
    NumericalError,
    StateError,
)
from .decorators import log_experiment_execution
from .session import (
    start_run,
    end_run,
    get_run_logger,
    log_metrics,
    get_current_run_id,
)

__all__ = [
    "get_logger",
    "setup_logging",
    "set_run_context",
    "MRVAEError",
    "ConfigError",
    "ConstructionError",
    "DimensionError",
    "DomainError",
    "FormatError",
    "NumericalError",
    "StateError",
    "log_experiment_execution",
    "start_run",
    "end_run",
    "get_run_logger",
    "log_metrics",
    "get_current_run_id",
]
