"""
Decorators shared across mrvae experiments.
"""

import functools
import time
from typing import Any, Dict

from mrvae.core.logging import get_logger
from mrvae.core.session import log_metrics


def run_summary(config) -> Dict[str, Any]:
    """Seed, beta range and step budget of a run config; empty for anything else."""
    train = getattr(config, "train", None)
    if train is None:
        return {}
    summary = {
        "seed": train.seed,
        "beta_min": train.beta_range.a,
        "beta_max": train.beta_range.b,
        "epochs": train.epochs,
        "batch_size": train.batch_size,
    }
    sweep = getattr(config, "sweep", None)
    if sweep is not None:
        summary["sweep_betas"] = sweep.num_betas
    return summary


def log_experiment_execution(func):
    """
    Log an experiment run with the seed, training beta range and step budget
    of its config, its exit code or failure, and its wall time. The same row
    goes to the run telemetry.
    """

    @functools.wraps(func)
    def wrapper(config, out_dir, *args, **kwargs):
        logger = get_logger(func.__module__)
        name = func.__name__
        row = {"experiment": name, **run_summary(config), "status": "unknown"}

        if "seed" in row:
            logger.info(
                f"Executing experiment: {name} (seed={row['seed']}, "
                f"beta in [{row['beta_min']:g}, {row['beta_max']:g}], "
                f"{row['epochs']} epochs of batch {row['batch_size']})"
            )
        else:
            logger.info(f"Executing experiment: {name}")
        started = time.perf_counter()
        try:
            result = func(config, out_dir, *args, **kwargs)
            row["status"] = "success"
            row["exit_code"] = result
            row["seconds"] = round(time.perf_counter() - started, 3)
            logger.info(f"Experiment '{name}' finished with code {result} in {row['seconds']}s.")
            log_metrics(row)
            return result
        except Exception as e:
            logger.error(f"Error executing experiment '{name}': {e}", exc_info=True)
            row["status"] = "failure"
            row["error"] = str(e)
            row["seconds"] = round(time.perf_counter() - started, 3)
            log_metrics(row)
            raise

    return wrapper
