"""Command-line frontend: `vqthermo <experiment> --config <path> [--jobs N] [--output <path>]`."""

from __future__ import annotations

import argparse
import os
import sys
from typing import TYPE_CHECKING

from loguru import logger

from modules.config import ConfigError, load_config
from modules.data import LOG_ENV_VAR
from modules.experiments import Experiment, run_experiment

if TYPE_CHECKING:
    from collections.abc import Sequence

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqthermo",
        description="Quantum thermal machines built from virtual qubits: sweeps written as CSV.",
    )
    parser.add_argument("experiment", choices=[str(e) for e in Experiment], help="experiment to run")
    parser.add_argument("--config", required=True, help="TOML experiment file")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps (default 1)")
    parser.add_argument("--output", default=None, help="CSV path; overrides the config's output")
    return parser


def configure_logging() -> None:
    """Log to stderr at the level named by the environment variable, INFO by default."""
    logger.remove()
    logger.add(sys.stderr, level=os.environ.get(LOG_ENV_VAR, "INFO").upper())


def main(argv: Sequence[str] | None = None) -> int:
    """Runs one experiment.

    :param argv: Arguments without the program name; defaults to `sys.argv[1:]`.
    :return: 0 on success, 2 on a configuration error, 1 on a computation error.
    """
    args = build_parser().parse_args(argv)
    configure_logging()
    if args.jobs < 1:
        logger.error(f"--jobs must be at least 1, got {args.jobs}")
        return EXIT_CONFIG

    try:
        cfg = load_config(args.config)
        if cfg.experiment != args.experiment:
            logger.info(f"config declares {cfg.experiment}, running {args.experiment}")
            cfg = cfg.model_copy(update={"experiment": args.experiment})

        path = run_experiment(cfg, output=args.output, jobs=args.jobs)
    except ConfigError as error:
        logger.error(str(error))
        return EXIT_CONFIG
    except (ValueError, RuntimeError) as error:
        logger.error(f"{args.experiment} failed: {error}")
        return EXIT_FAILURE

    logger.info(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
