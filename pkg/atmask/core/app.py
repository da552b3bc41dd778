"""
Command-line application factory.

create_app() builds the argument parser with every subcommand;
run() parses, configures logging, dispatches and applies the error
boundary: one JSON line on stderr and a nonzero exit code on failure.
"""
import argparse
import json
import logging
import sys
import time
import uuid
from typing import List, Optional

from atmask import __version__
from atmask.config.settings import get_settings
from atmask.utils.exceptions import ATMaskError, UsageError

from .logging_config import run_id_var, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_ERROR = 2


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors raise UsageError instead of exiting."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def create_app() -> argparse.ArgumentParser:
    """
    Create and configure the command-line parser.

    Returns:
        Parser whose subcommands carry a ``handler`` default.
    """
    parser = CliParser(
        prog="atmask",
        description="Texture-aware masking for 3D volumes: variation maps, patch masks, "
                    "toy masked reconstruction and segmentation metrics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _include_routers(parser)
    return parser


def _include_routers(parser: argparse.ArgumentParser) -> None:
    """Register all subcommands."""
    from atmask.routers import (
        config_router,
        experiment_router,
        mask_router,
        metrics_router,
        texture_router,
        training_router,
        volume_router,
    )
    from atmask.routers.common import common_parser

    parents = [common_parser()]
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for router in (volume_router, texture_router, mask_router, training_router,
                   metrics_router, experiment_router, config_router):
        router.register(subparsers, parents)


def _emit_error(exc: BaseException) -> None:
    print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run the selected subcommand and return the exit code."""
    try:
        args = create_app().parse_args(argv)
    except UsageError as exc:
        _emit_error(exc)
        return EXIT_ERROR

    settings = get_settings()
    setup_logging(
        log_level=args.log_level or settings.log_level,
        log_dir=settings.log_dir,
        log_json=settings.log_json,
        log_to_file=settings.log_to_file,
    )

    token = run_id_var.set(uuid.uuid4().hex[:12])
    started = time.perf_counter()
    try:
        code = args.handler(args) or EXIT_OK
        logger.debug(
            f"{args.command} finished",
            extra={"command": args.command, "duration_ms": round((time.perf_counter() - started) * 1000, 2)},
        )
        return code
    except (ATMaskError, OSError) as exc:
        logger.error(f"{args.command} failed: {exc}", extra={"command": args.command})
        _emit_error(exc)
        return EXIT_ERROR
    except Exception as exc:
        logger.exception(f"{args.command} crashed", extra={"command": args.command})
        _emit_error(exc)
        return EXIT_UNEXPECTED
    finally:
        run_id_var.reset(token)
