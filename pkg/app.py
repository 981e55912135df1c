"""
NRP toolkit
Command-line entry point
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from models.errors import CapacityError, ConfigError, InputError, NRPError, PreconditionError
from utils.config import get_settings

logger = logging.getLogger("nrp")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with every command group registered."""
    parser = argparse.ArgumentParser(
        prog="app.py",
        description="Next Release Problem toolkit: generate, solve, backbone, landscape, experiment",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging (ABMA level traces)")
    subparsers = parser.add_subparsers(dest="command", metavar="<command>")
    subparsers.required = True
    register_commands(subparsers)
    return parser


# Imported here to keep `app` importable without pulling in every command
def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register command groups."""
    from commands import analytics, solve_commands

    solve_commands.register(subparsers)
    analytics.register(subparsers)


def configure_logging(verbose: bool = False) -> None:
    level = "DEBUG" if verbose else get_settings().log_level
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, CapacityError):
        return EXIT_CAPACITY
    if isinstance(error, (InputError, ConfigError, PreconditionError, FileNotFoundError)):
        return EXIT_INPUT
    return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    """Parse `argv`, run the command and return its exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.verbose)
        return args.handler(args)
    except (NRPError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
