from __future__ import annotations

import argparse
import logging
from pathlib import Path

from wlfactor.commands.common import add_config_arguments, emit, field_ctx, run_config
from wlfactor.schemas.config import RunConfig
from wlfactor.schemas.report import BatchFailure, BatchReport, FactorReport
from wlfactor.services.errors import FactoringError, InternalInvariantBroken, MalformedInput
from wlfactor.services.fppoly import FpPoly
from wlfactor.services.pipeline import run_factor
from wlfactor.services.verification import verify_run


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("factor", help="factor a polynomial over F_p")
    parser.add_argument("--p", type=int, help="odd prime modulus")
    parser.add_argument("--poly", help="coefficients, constant first, e.g. 12,0,0,1")
    parser.add_argument("--input", type=Path, default=None, help="batch file with one 'p;coeffs' instance per line")
    add_config_arguments(parser)
    parser.set_defaults(func=run)


def _factor_one(p: int, text: str, cfg: RunConfig) -> FactorReport:
    f = FpPoly.from_text(text, field_ctx(p, cfg))
    _, report = run_factor(f, cfg)
    if cfg.verify:
        verification = verify_run(f, cfg)
        failed = [check.name for check in verification.checks if not check.passed]
        if failed:
            raise InternalInvariantBroken(f"Verification failed for {text} mod {p}: {', '.join(failed)}")
    return report


def _parse_line(line: str) -> tuple[int, str]:
    p_text, sep, coeffs = line.partition(";")
    if not sep:
        raise MalformedInput(f"Batch line must look like 'p;coeffs', got: {line!r}")
    try:
        return int(p_text.strip()), coeffs.strip()
    except ValueError as exc:
        raise MalformedInput(f"Batch line has a non-integer modulus: {line!r}") from exc


def _run_batch(path: Path, cfg: RunConfig) -> BatchReport:
    batch = BatchReport()
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            p, text = _parse_line(line)
            batch.reports.append(_factor_one(p, text, cfg))
        except FactoringError as exc:
            logger.warning("Batch line %s failed: %s", number, exc)
            batch.failures.append(BatchFailure(line=number, error=type(exc).__name__, message=str(exc)))
    return batch


def run(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    if args.input is not None:
        batch = _run_batch(args.input, cfg)
        emit(batch, args.json_out)
        return 1 if batch.failures else 0
    if args.p is None or args.poly is None:
        raise MalformedInput("factor needs --p and --poly, or --input FILE.")
    emit(_factor_one(args.p, args.poly, cfg), args.json_out)
    return 0
