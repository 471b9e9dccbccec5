from __future__ import annotations

import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

from wlfactor.commands.common import emit
from wlfactor.schemas.scheme import SchemeDump
from wlfactor.services.errors import MalformedInput
from wlfactor.services.scheme import (
    closed_subsets_by_generator,
    coloring_from_dump,
    fixture_generators,
    is_primitive,
    scheme_to_dump,
    schurian_fixture,
    verify_scheme,
)


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("scheme", help="verify a scheme and report primitivity and closed subsets")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--fixture", help="cyclic:m, dihedral:m or symmetric:m")
    source.add_argument("--file", type=Path, help="scheme JSON with dense colors")
    parser.add_argument("--json-out", type=Path, default=None)
    parser.set_defaults(func=run)


def _read(path: Path) -> SchemeDump:
    try:
        return SchemeDump.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise MalformedInput(f"{path} is not a scheme file: {exc.error_count()} error(s).") from exc
    except OSError as exc:
        raise MalformedInput(f"Cannot read {path}: {exc}") from exc


def run(args: argparse.Namespace) -> int:
    if args.fixture:
        coloring = schurian_fixture(fixture_generators(args.fixture))
    else:
        coloring = coloring_from_dump(_read(args.file))
    sch = verify_scheme(coloring)
    verdict = is_primitive(sch)
    logger.info("Scheme on %s points: %s colors, %s.", sch.n, len(sch.color_ids),
                "primitive" if verdict.primitive else "imprimitive")
    emit(scheme_to_dump(sch, verdict, closed_subsets_by_generator(sch).values()), args.json_out)
    return 0
