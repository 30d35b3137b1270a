#!/usr/bin/env python3
"""
Main Entry Point - GPI Resource Estimator

This script configures logging, loads optional flag defaults from a config
file, dispatches to the selected subcommand and turns the outcome into a
stable exit code.

Configuration:
    --config FILE is a dotenv-format file whose upper-case keys name flags
    (EPS=0.01, MODEL=Selinger15, LOG_BASE=2). Values become defaults, so flags
    given on the command line still win. Only the file is read, never the
    process environment.

Exit Codes:
    0: Success
    1: Unexpected error, or validation found bound violations
    2: Input error (bad flag, bad tree file, bad config file)
    3: Infeasible budget
    4: Output could not be written

Usage:
    python3 main.py budget --n-r 100 --eps 0.01
    python3 main.py --log-level INFO validate --workers 4 --db
    python3 main.py figures --output-dir figures
"""

import json
import logging
import sys
from pathlib import Path

from dotenv import dotenv_values

from config import EXIT_FAILURE, EXIT_INFEASIBLE, EXIT_INPUT_ERROR, EXIT_IO_ERROR, EXIT_OK
from budget import InfeasibleBudgetError
from cli.commands import build_parser, global_options

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(processName)s] %(message)s"


def configure_logging(level: str | None = None, log_file: str | None = None) -> None:
    """
    Configure root logging once for the whole run.

    Args:
        level: Level name (default WARNING)
        log_file: Append to this file instead of stderr

    Note:
        Process names in the format tell Monte-Carlo worker processes apart.
    """
    logging.basicConfig(
        level=getattr(logging, (level or "WARNING").upper(), logging.WARNING),
        format=LOG_FORMAT,
        filename=log_file,
        filemode="a",
    )


def load_config_file(path: str) -> dict:
    """
    Read flag defaults from a dotenv-format file.

    Returns:
        Upper-case keys -> string values; keys without a value are dropped.
        ${VAR} references are kept literally, the process environment is never read

    Raises:
        FileNotFoundError: if the file does not exist
    """
    if not Path(path).is_file():
        raise FileNotFoundError(f"Config file not found: {path}")
    return {key.upper(): value for key, value in dotenv_values(path, interpolate=False).items()
            if value is not None}


def run_command(args) -> int:
    """
    Run the parsed subcommand and map exceptions to exit codes.

    Error Handling:
        InfeasibleBudgetError -> 3 (checked first, it is also a ValueError)
        ValueError (bad values, malformed trees), JSON decode errors -> 2
        OSError while writing output -> 4
        Anything else -> 1, logged with full traceback
    """
    try:
        return args.handler(args)
    except InfeasibleBudgetError as e:
        logger.error(f"Infeasible budget: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INFEASIBLE
    except (ValueError, json.JSONDecodeError) as e:
        logger.error(f"Input error: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"Output error: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_IO_ERROR
    except Exception as e:
        logger.error(f"Command {args.command} crashed: {e}", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILURE


def main(argv: list[str] | None = None) -> int:
    """
    Parse arguments, set up logging and run one subcommand.

    Flow:
        1. Pre-parse --config / --log-level / --log-file (must precede the subcommand)
        2. Load the config file; its LOG_LEVEL / LOG_FILE apply unless given as flags
        3. Build the parser with config values as defaults and parse everything
        4. Dispatch and return the exit code

    Returns:
        Process exit code (see module docstring)
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        pre, _ = global_options().parse_known_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR

    config_values = {}
    if pre.config:
        try:
            config_values = load_config_file(pre.config)
        except OSError as e:
            configure_logging(pre.log_level, pre.log_file)
            sys.stderr.write(f"error: {e}\n")
            return EXIT_INPUT_ERROR

    configure_logging(
        pre.log_level or config_values.get("LOG_LEVEL"),
        pre.log_file or config_values.get("LOG_FILE"),
    )
    parser = build_parser(config_values)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad flags and 0 after --help
        return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR

    logger.info(f"Running {args.command}")
    code = run_command(args)
    logger.info(f"{args.command} finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
