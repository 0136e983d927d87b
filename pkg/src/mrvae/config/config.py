"""
Runtime configuration for mrvae, read from environment variables
"""

import os
from typing import Any, Dict

from mrvae.core.exceptions import ConfigError

VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL", "OFF", "QUIET"]


def get_runtime_config() -> Dict[str, Any]:
    """Get runtime configuration from environment variables"""

    seed = os.getenv("MRVAE_SEED")
    config = {
        "log_level": os.getenv("MRVAE_LOG_LEVEL", "INFO").upper(),
        "log_file": os.getenv("MRVAE_LOG_FILE"),
        "seed": None,
        "telemetry_enabled": os.getenv("MRVAE_TELEMETRY", "true").lower() == "true",
    }

    if seed is not None and seed.strip():
        try:
            config["seed"] = int(seed)
        except ValueError:
            raise ConfigError(f"MRVAE_SEED must be an integer, got {seed!r}")
        if config["seed"] < 0:
            raise ConfigError(f"MRVAE_SEED must be non-negative, got {config['seed']}")

    if config["log_level"] not in VALID_LOG_LEVELS:
        raise ConfigError(
            f"Invalid log level: {config['log_level']}. "
            f"Must be one of: {', '.join(VALID_LOG_LEVELS)}"
        )

    return config


def print_config_help():
    """Print configuration help"""
    print("\nmrvae Runtime Configuration:")
    print("============================")
    print()
    print("Optional Environment Variables:")
    print(
        "  MRVAE_LOG_LEVEL  Logging level (default: INFO, options: DEBUG, INFO, WARNING, ERROR, CRITICAL, OFF, QUIET)"
    )
    print("  MRVAE_LOG_FILE   Log file path (default: logs/mrvae.log under the project root)")
    print("  MRVAE_SEED       Seed used when neither --seed nor the run config sets one")
    print("  MRVAE_TELEMETRY  Write per-run JSON telemetry under <out>/runs (default: true)")
    print()
    print("Example:")
    print("  export MRVAE_LOG_LEVEL=DEBUG")
    print("  export MRVAE_SEED=7")
    print("  mrvae verify-theorem1 --config configs/verify_theorem1.yaml --out out/thm1")
    print()
