from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pydantic import BaseModel

from wlfactor.config import load_run_config
from wlfactor.schemas.config import RunConfig
from wlfactor.services.ffield import FieldCtx, make_field_ctx
from wlfactor.services.fppoly import FpPoly


def add_instance_arguments(parser: argparse.ArgumentParser, *, required: bool = True) -> None:
    parser.add_argument("--p", type=int, required=required, help="odd prime modulus")
    parser.add_argument("--poly", required=required, help="coefficients, constant first, e.g. 12,0,0,1")
    add_config_arguments(parser)


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="RunConfig JSON file")
    parser.add_argument("--json-out", type=Path, default=None, help="write the JSON report here instead of stdout")


def run_config(args: argparse.Namespace) -> RunConfig:
    return load_run_config(args.config)


def field_ctx(p: int, cfg: RunConfig) -> FieldCtx:
    return make_field_ctx(
        p,
        scan_constant=cfg.nonresidue_scan_constant,
        allow_full_scan=cfg.allow_full_nonresidue_scan,
    )


def instance(args: argparse.Namespace, cfg: RunConfig) -> FpPoly:
    return FpPoly.from_text(args.poly, field_ctx(args.p, cfg))


def emit(model: BaseModel, json_out: Path | None) -> None:
    text = model.model_dump_json(indent=2)
    if json_out is None:
        sys.stdout.write(text + "\n")
    else:
        json_out.write_text(text + "\n", encoding="utf-8")
