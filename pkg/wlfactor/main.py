from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from wlfactor.commands import COMMANDS
from wlfactor.config import Settings, get_settings
from wlfactor.services.errors import ConfigInvalid, FactoringError


logger = logging.getLogger(__name__)


def create_parser(settings: Settings | None = None) -> argparse.ArgumentParser:
    settings = settings or get_settings()
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Deterministic factoring over F_p through Weisfeiler-Leman refinement of root-difference colors.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def _configure_logging(settings: Settings) -> None:
    logging.basicConfig(
        level=settings.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _load_settings() -> Settings:
    try:
        return get_settings()
    except (ValueError, RuntimeError) as exc:
        raise ConfigInvalid(f"Invalid environment settings: {exc}") from exc


def _report(exc: FactoringError) -> int:
    sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
    return exc.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        settings = _load_settings()
    except ConfigInvalid as exc:
        return _report(exc)
    _configure_logging(settings)
    args = create_parser(settings).parse_args(argv)
    try:
        return args.func(args)
    except FactoringError as exc:
        logger.debug("Command %s failed.", args.command, exc_info=True)
        return _report(exc)


if __name__ == "__main__":
    sys.exit(main())
