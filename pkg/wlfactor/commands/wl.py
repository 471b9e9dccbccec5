from __future__ import annotations

import argparse
import logging

from wlfactor.commands.common import add_instance_arguments, emit, instance, run_config
from wlfactor.schemas.report import StageFactor
from wlfactor.services.balance import augment_with_identity, stronger_balance, sylow_root_filter, zero_root_factor
from wlfactor.services.errors import DegenerateInput
from wlfactor.services.fppoly import normalize_input
from wlfactor.services.tower import Factor, base_tower
from wlfactor.services.wl2 import dump_color_set, wl2_implicit


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("wl", help="run the balance and WL stages and dump the stable color set")
    add_instance_arguments(parser)
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    f, _ = normalize_input(instance(args, cfg))
    if f.degree < 2:
        raise DegenerateInput(f"Nothing to refine: the normalized input has degree {f.degree}.")

    found = zero_root_factor(f) or sylow_root_filter(f)
    if not isinstance(found, Factor):
        found = stronger_balance(f, base_tower(f, ceiling=cfg.dimension_ceiling))
    if not isinstance(found, Factor):
        found = wl2_implicit(augment_with_identity(found), ceiling=cfg.dimension_ceiling)
    if isinstance(found, Factor):
        logger.info("Stage %s found a factor before the color set stabilised.", found.source)
        emit(StageFactor(stage=found.source, factor=found.factor.monic().to_text()), args.json_out)
        return 0
    emit(dump_color_set(found), args.json_out)
    return 0
