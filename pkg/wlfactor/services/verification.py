"""Oracle verification: replay a run against brute-force roots.

Every implicit artifact is materialised at the roots of f and checked against
its explicit counterpart. Checks report pass/fail; only an oracle bound
violation aborts the run.
"""

from __future__ import annotations

import logging
from typing import Sequence

from wlfactor.schemas.config import RunConfig
from wlfactor.schemas.report import CheckResult, VerificationReport
from wlfactor.services.balance import (
    ColorSet,
    augment_with_identity,
    stronger_balance,
    sylow_root_filter,
)
from wlfactor.services.errors import AxiomViolation, DimensionCeilingExceeded, MalformedInput
from wlfactor.services.ffield import is_stronger_balanced, sylow_signature
from wlfactor.services.fppoly import FpPoly, brute_force_roots, from_roots, normalize_input
from wlfactor.services.pipeline import FullFactorization, FactorOutcome, factor_pipeline, outcome_kind
from wlfactor.services.scheme import scheme_from_stable, verify_scheme
from wlfactor.services.tower import Factor, base_tower
from wlfactor.services.wl2 import (
    StableColorSet,
    materialize_colors,
    validate_well_behaved,
    wl2_explicit,
    wl2_implicit,
)


logger = logging.getLogger(__name__)


def _check(name: str, passed: bool, detail: str = "") -> CheckResult:
    if not passed:
        logger.warning("Verification check %s failed. %s", name, detail)
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def _factor_check(name: str, found: Factor, f: FpPoly) -> CheckResult:
    proper = found.factor.divides(f) and 1 <= found.factor.degree < f.degree
    return _check(name, proper, f"factor {found.factor.to_text()}")


def _intersection_check(name: str, state: StableColorSet, roots: Sequence[int]) -> CheckResult:
    """Product table multiplicities against intersection numbers of the materialised colors."""
    try:
        explicit = verify_scheme(materialize_colors(state, roots))
    except (AxiomViolation, MalformedInput) as exc:
        return _check(name, False, str(exc))
    ids = state.ids()
    expected = {(ids[p], ids[q], ids[r]): value for (p, q, r), value in explicit.intersection.items()}
    return _check(name, scheme_from_stable(state).intersection == expected)


def _stage_checks(f: FpPoly, roots: Sequence[int], cfg: RunConfig) -> list[CheckResult]:
    ctx = f.ctx
    n = len(roots)
    checks = []

    signatures = {sylow_signature(a, ctx) for a in roots}
    filtered = sylow_root_filter(f)
    checks.append(
        _check(
            "sylow_filter",
            (len(signatures) > 1) == isinstance(filtered, Factor),
            f"{len(signatures)} distinct root signatures",
        )
    )
    if isinstance(filtered, Factor):
        checks.append(_factor_check("sylow_factor", filtered, f))
        return checks

    try:
        balanced = stronger_balance(f, base_tower(f, ceiling=cfg.dimension_ceiling))
        if isinstance(balanced, Factor):
            checks.append(_factor_check("stronger_balance", balanced, f))
            return checks
        checks.append(_check("stronger_balance", is_stronger_balanced(roots, ctx), "colors on an unbalanced f"))
        checks.append(_initial_color_check(balanced, roots))

        state = augment_with_identity(balanced)
        stable = wl2_implicit(state, ceiling=cfg.dimension_ceiling)
    except DimensionCeilingExceeded as exc:
        checks.append(_check("dimension_ceiling", True, str(exc)))
        return checks
    if isinstance(stable, Factor):
        checks.append(_factor_check("wl2_factor", stable, f))
        return checks

    explicit = wl2_explicit(materialize_colors(state, roots))
    implicit = materialize_colors(stable, roots)
    checks.append(
        _check(
            "wl2_partition",
            implicit.partition() == explicit.partition(),
            f"implicit {len(stable)} colors, explicit {len(explicit.colors)}",
        )
    )
    checks.append(
        _check(
            "wl2_structure",
            2 <= len(stable) <= n and stable.identity is not None and stable.rounds <= n,
            f"{len(stable)} colors after {stable.rounds} rounds",
        )
    )
    checks.append(_intersection_check("intersection_numbers", stable, roots))
    return checks


def _initial_color_check(state: ColorSet, roots: Sequence[int]) -> CheckResult:
    """Every edge of an initial color has the color's signature."""
    coloring = materialize_colors(state, roots)
    for color, matrix in zip(state.colors, coloring.colors):
        for i, j in zip(*matrix.nonzero()):
            if sylow_signature(roots[i] - roots[j], state.ctx) != color.signature:
                return _check("initial_colors", False, f"color {color.id} at ({roots[i]}, {roots[j]})")
    total = sum(int(m.sum()) for m in coloring.colors)
    return _check("initial_colors", total == len(roots) * (len(roots) - 1), f"{total} off-diagonal pairs colored")


def _outcome_checks(outcome: FactorOutcome, normalized: FpPoly, roots: Sequence[int]) -> list[CheckResult]:
    stalled = () if isinstance(outcome, FullFactorization) else outcome.stalled
    product = FpPoly.constant(normalized.ctx, 1)
    for g in list(outcome.factors) + [s.poly for s in stalled]:
        product = product * g
    checks = [
        _check("factors_divide", all(g.divides(normalized) for g in outcome.factors)),
        _check("factor_product", product == normalized),
    ]
    if isinstance(outcome, FullFactorization):
        found = sorted((-g.coeffs[0]) % normalized.ctx.p for g in outcome.factors)
        checks.append(
            _check(
                "full_factorization_roots",
                all(g.degree == 1 for g in outcome.factors) and found == sorted(roots),
            )
        )
    return checks


def verify_color_set(state: ColorSet, f: FpPoly, roots: Sequence[int]) -> list[CheckResult]:
    """Checks on a replayed color set, e.g. one loaded from a dump file."""
    if state.f != f:
        return [_check("color_file_polynomial", False, f"file is for {state.f.to_text()}, run is for {f.to_text()}")]
    coloring = materialize_colors(state, roots)
    try:
        validate_well_behaved(coloring)
    except MalformedInput as exc:
        return [_check("color_file_well_behaved", False, str(exc))]
    checks = [_check("color_file_well_behaved", True)]
    if isinstance(state, StableColorSet):
        explicit = wl2_explicit(coloring)
        checks.append(_check("color_file_stable", explicit.partition() == coloring.partition()))
        checks.append(_intersection_check("color_file_products", state, roots))
    return checks


def verify_run(f: FpPoly, cfg: RunConfig, *, against: ColorSet | None = None) -> VerificationReport:
    normalized, _ = normalize_input(f)
    roots = brute_force_roots(normalized, oracle_bound=cfg.oracle_bound)
    checks = [_check("roots", from_roots(roots, f.ctx) == normalized)]

    stage_poly, stage_roots = normalized, list(roots)
    if 0 in roots and len(roots) >= 2:
        stage_poly = normalized // FpPoly.x(f.ctx)
        stage_roots = [a for a in roots if a]
    if len(stage_roots) >= 2:
        checks.extend(_stage_checks(stage_poly, stage_roots, cfg))

    outcome = factor_pipeline(f, cfg)
    checks.extend(_outcome_checks(outcome, normalized, roots))
    if against is not None:
        checks.extend(verify_color_set(against, stage_poly, stage_roots))

    report = VerificationReport(
        p=f.ctx.p,
        f=f.to_text(),
        roots=list(roots),
        outcome=outcome_kind(outcome),
        factors=[g.to_text() for g in outcome.factors],
        checks=checks,
    )
    logger.info("Verification of %s: %s of %s checks passed.", f.to_text(), sum(c.passed for c in checks), len(checks))
    return report
