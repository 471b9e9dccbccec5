from __future__ import annotations

import argparse
from pathlib import Path

from wlfactor.commands.common import emit
from wlfactor.services.errors import MalformedInput
from wlfactor.services.scheme import fixture_generators, scheme_to_dump, schurian_fixture, verify_scheme


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("fixture", help="emit the 2-orbit scheme of a permutation group")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--spec", help="cyclic:m, dihedral:m or symmetric:m")
    source.add_argument(
        "--generators",
        help="permutations as images separated by ';', e.g. '1,2,0;0,2,1'",
    )
    parser.add_argument("--json-out", type=Path, default=None)
    parser.set_defaults(func=run)


def _parse_generators(text: str) -> list[list[int]]:
    try:
        return [[int(v) for v in chunk.split(",")] for chunk in text.split(";") if chunk.strip()]
    except ValueError as exc:
        raise MalformedInput(f"Generators must be comma-separated integers, got: {text!r}") from exc


def run(args: argparse.Namespace) -> int:
    generators = fixture_generators(args.spec) if args.spec else _parse_generators(args.generators)
    emit(scheme_to_dump(verify_scheme(schurian_fixture(generators))), args.json_out)
    return 0
