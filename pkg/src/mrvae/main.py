#!/usr/bin/env python3
"""
mrvae command line

    mrvae <experiment> --config run.yaml [--seed N] [--out DIR]

Exit codes: 0 success, 1 invalid input or failed validation, 2 numerical failure.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from mrvae.config import get_runtime_config, load_run_config, print_config_help
from mrvae.config.schema import EXPERIMENTS
from mrvae.core import end_run, start_run
from mrvae.core.exceptions import ConfigError, MRVAEError, NumericalError
from mrvae.core.logging import get_logger, set_run_context, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mrvae", description="Multi-rate VAE experiments")
    sub = parser.add_subparsers(dest="experiment", metavar="experiment")
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run {name}")
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None, help="override train.seed")
        p.add_argument("--out", default=None, help="output directory (overrides out_dir)")
    return parser


def _usage(parser: argparse.ArgumentParser, message: Optional[str] = None) -> int:
    if message:
        print(f"mrvae: error: {message}", file=sys.stderr)
    parser.print_usage(sys.stderr)
    return EXIT_INVALID


def _resolve_seed(cli_seed: Optional[int], config, env_seed: Optional[int]) -> Optional[int]:
    if cli_seed is not None:
        return cli_seed
    if "seed" not in config.train.model_fields_set:
        return env_seed
    return None


def cli_dispatch(args: Optional[List[str]] = None) -> int:
    """Parse ``args``, run one experiment and return its exit code."""
    parser = build_parser()
    args = sys.argv[1:] if args is None else list(args)
    if not args:
        return _usage(parser)
    try:
        ns = parser.parse_args(args)
    except UsageError as e:
        return _usage(parser, str(e))
    if ns.experiment is None:
        return _usage(parser)

    try:
        runtime = get_runtime_config()
    except ConfigError as e:
        print(f"Configuration Error: {e}", file=sys.stderr)
        print_config_help()
        return EXIT_INVALID
    setup_logging(runtime["log_level"], runtime["log_file"], force=True)

    from mrvae.experiments import default_registry

    registry = default_registry()
    if ns.experiment not in registry:
        return _usage(parser, f"experiment {ns.experiment!r} is not available")

    run_id = None
    try:
        config = load_run_config(ns.config, ns.experiment)
        config = config.with_overrides(_resolve_seed(ns.seed, config, runtime["seed"]), ns.out)
        out_dir = Path(config.out_dir)
        if runtime["telemetry_enabled"]:
            run_id = start_run(out_dir=str(out_dir))
        set_run_context(ns.experiment, run_id)
        logger.info(f"running {ns.experiment} with seed {config.train.seed}, output in {out_dir}")
        return registry.get(ns.experiment)(config, out_dir)
    except NumericalError as e:
        print(f"Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MRVAEError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:
        logger.error(f"An unexpected error occurred: {e}", exc_info=True)
        print(f"Unexpected error: {e}", file=sys.stderr)
        return EXIT_INVALID
    finally:
        set_run_context()
        if run_id:
            end_run(run_id)


def main():
    sys.exit(cli_dispatch())


__all__ = ["main", "cli_dispatch"]

if __name__ == "__main__":
    main()
