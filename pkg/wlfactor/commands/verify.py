from __future__ import annotations

import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

from wlfactor.commands.common import add_instance_arguments, emit, instance, run_config
from wlfactor.schemas.colors import ColorSetDump
from wlfactor.services.errors import MalformedInput
from wlfactor.services.verification import verify_run
from wlfactor.services.wl2 import load_color_set


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="replay a run against brute-force roots")
    add_instance_arguments(parser)
    parser.add_argument("--against", type=Path, default=None, help="ColorSet JSON to check against the oracle")
    parser.set_defaults(func=run)


def _load_dump(path: Path) -> ColorSetDump:
    try:
        return ColorSetDump.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise MalformedInput(f"{path} is not a color set file: {exc.error_count()} error(s).") from exc
    except OSError as exc:
        raise MalformedInput(f"Cannot read {path}: {exc}") from exc


def run(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    f = instance(args, cfg)
    against = load_color_set(_load_dump(args.against)) if args.against is not None else None
    report = verify_run(f, cfg, against=against)
    emit(report, args.json_out)
    if not report.passed:
        logger.error("%s of %s checks failed.", sum(not c.passed for c in report.checks), len(report.checks))
        return 1
    return 0
