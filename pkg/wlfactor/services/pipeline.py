"""The factoring pipeline and its JSON report.

Each component runs zero root -> Sylow filter -> stronger balance -> implicit
WL -> sanity checks -> scheme and primitivity -> primitive reduction. Any
factor found is split off and both halves go through the pipeline again. A
component with no factor left may retry on f_q for the configured candidate
q's before it is reported as stalled with its certificate.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Union

from wlfactor.schemas.config import RunConfig
from wlfactor.schemas.report import CertificateReport, FactorReport, StageReport
from wlfactor.services.balance import augment_with_identity, stronger_balance, sylow_root_filter, zero_root_factor
from wlfactor.services.errors import DimensionCeilingExceeded, InternalInvariantBroken, TrivialResult
from wlfactor.services.fppoly import FpPoly, build_fq, is_squarefree, lift_factor, normalize_input
from wlfactor.services.scheme import (
    PrimitivityVerdict,
    Scheme,
    is_primitive,
    primitive_reduction,
    scheme_from_stable,
)
from wlfactor.services.tower import Factor, base_tower
from wlfactor.services.wl2 import StableColorSet, ThinSchemeCertificate, sanity_checks, wl2_implicit


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchemeCertificate:
    state: StableColorSet
    scheme: Scheme
    verdict: PrimitivityVerdict
    reduction_trail: tuple[str, ...] = ()


@dataclass(frozen=True)
class CeilingAbort:
    detail: str


Certificate = Union[ThinSchemeCertificate, SchemeCertificate, CeilingAbort]


@dataclass(frozen=True)
class StalledComponent:
    poly: FpPoly
    certificate: Certificate


@dataclass(frozen=True)
class FullFactorization:
    normalized: FpPoly
    factors: tuple[FpPoly, ...]


@dataclass(frozen=True)
class Partial:
    normalized: FpPoly
    factors: tuple[FpPoly, ...]
    stalled: tuple[StalledComponent, ...]


@dataclass(frozen=True)
class Stalled:
    normalized: FpPoly
    component: StalledComponent

    @property
    def factors(self) -> tuple[FpPoly, ...]:
        return ()

    @property
    def stalled(self) -> tuple[StalledComponent, ...]:
        return (self.component,)


FactorOutcome = Union[FullFactorization, Partial, Stalled]


@dataclass
class _Run:
    cfg: RunConfig
    stages: list[StageReport] = field(default_factory=list)

    def record(self, name: str, component: FpPoly, outcome: str, started: float, **artifacts) -> None:
        timing = round((time.perf_counter() - started) * 1000, 3) if self.cfg.record_timings else None
        self.stages.append(
            StageReport(
                name=name,
                outcome=outcome,
                timing_ms=timing,
                artifacts={"component": component.to_text(), **artifacts},
            )
        )


def _found(run: _Run, name: str, component: FpPoly, started: float, found: Factor) -> Factor:
    factor = found.factor.monic()
    run.record(name, component, "factor", started, factor=factor.to_text())
    logger.info("Stage %s split a degree-%s component: factor degree %s.", name, component.degree, factor.degree)
    return Factor(factor, found.source)


def _stable_state(f: FpPoly, run: _Run) -> Factor | StableColorSet:
    ceiling = run.cfg.dimension_ceiling

    started = time.perf_counter()
    balanced = stronger_balance(f, base_tower(f, ceiling=ceiling))
    if isinstance(balanced, Factor):
        return _found(run, "stronger_balance", f, started, balanced)
    run.record("stronger_balance", f, "colors", started, colors=len(balanced))

    started = time.perf_counter()
    stable = wl2_implicit(augment_with_identity(balanced), ceiling=ceiling)
    if isinstance(stable, Factor):
        return _found(run, "wl2", f, started, stable)
    run.record("wl2", f, "stable", started, colors=len(stable), rounds=stable.rounds)
    return stable


def _reduce(f: FpPoly, stable: StableColorSet, verdict: PrimitivityVerdict, run: _Run, depth: int) -> tuple[Factor | None, tuple[str, ...]]:
    started = time.perf_counter()
    result = primitive_reduction(f, stable, verdict.witness)
    trail = [f"closed subset {result.closed.sorted_members()} of valency {result.n_d}: degree {f.degree} -> {result.g.degree}"]
    g, report = normalize_input(result.g)
    if g != result.g:
        trail.append(f"normalisation stripped {report.stripped_repeated} repeated and {report.stripped_nonsplitting} non-splitting degrees")
    inner = _find_split(g, run, depth + 1) if g.degree >= 2 else None
    if isinstance(inner, Factor):
        try:
            lifted = result.lift(inner.factor)
        except TrivialResult as exc:
            logger.warning("Lifting through the closed subset gave nothing: %s", exc)
        else:
            trail.append(f"lifted degree-{inner.factor.degree} factor of g to degree {lifted.degree}")
            return _found(run, "primitive_reduction", f, started, Factor(lifted, "primitive_reduction")), tuple(trail)
    run.record("primitive_reduction", f, "stalled", started, reduced=g.to_text())
    return None, tuple(trail)


def _try_candidates(f: FpPoly, run: _Run, depth: int) -> Factor | None:
    if depth >= run.cfg.max_recursion_depth:
        return None
    for text in run.cfg.candidate_qs[: run.cfg.max_candidates]:
        started = time.perf_counter()
        q = FpPoly.from_text(text, f.ctx) % f
        if q.degree < 1:
            logger.warning("Skipping candidate q=%s: constant modulo f.", text)
            continue
        f_q = build_fq(f, q)
        if f_q == f:
            logger.debug("Skipping candidate q=%s: f_q equals f.", text)
            continue
        if not is_squarefree(f_q):
            logger.warning("Skipping candidate q=%s: f_q is not squarefree.", text)
            run.record("candidate_q", f, "skipped", started, q=text)
            continue
        inner = _find_split(f_q, run, depth + 1)
        if not isinstance(inner, Factor):
            run.record("candidate_q", f, "stalled", started, q=text)
            continue
        try:
            lifted = lift_factor(inner.factor, q, f)
        except TrivialResult as exc:
            logger.warning("Candidate q=%s gave no factor of f: %s", text, exc)
            continue
        return _found(run, "candidate_q", f, started, Factor(lifted, "candidate_q"))
    return None


def _find_split(f: FpPoly, run: _Run, depth: int) -> Factor | StalledComponent:
    """One nontrivial factor of the squarefree splitting f, or its certificate."""
    started = time.perf_counter()
    found = zero_root_factor(f)
    if found is not None:
        return _found(run, "zero_root", f, started, found)

    started = time.perf_counter()
    filtered = sylow_root_filter(f)
    if isinstance(filtered, Factor):
        return _found(run, "sylow_filter", f, started, filtered)
    run.record("sylow_filter", f, "shared_signature", started, signature=filtered.signature.value)

    try:
        stable = _stable_state(f, run)
    except DimensionCeilingExceeded as exc:
        logger.warning("Component of degree %s hit the dimension ceiling: %s", f.degree, exc)
        certificate: Certificate = CeilingAbort(str(exc))
    else:
        if isinstance(stable, Factor):
            return stable
        started = time.perf_counter()
        thin = sanity_checks(stable)
        if thin is not None:
            run.record("sanity", f, "thin", started, colors=len(stable))
            certificate = thin
        else:
            sch = scheme_from_stable(stable)
            verdict = is_primitive(sch)
            run.record("scheme", f, "primitive" if verdict.primitive else "imprimitive", started, colors=len(stable))
            trail: tuple[str, ...] = ()
            if not verdict.primitive and depth < run.cfg.max_recursion_depth:
                reduced, trail = _reduce(f, stable, verdict, run, depth)
                if reduced is not None:
                    return reduced
            certificate = SchemeCertificate(stable, sch, verdict, trail)

    candidate = _try_candidates(f, run, depth)
    if candidate is not None:
        return candidate
    logger.info("Degree-%s component stalled with %s.", f.degree, type(certificate).__name__)
    return StalledComponent(f, certificate)


def _factor_component(f: FpPoly, run: _Run, depth: int) -> tuple[list[FpPoly], list[StalledComponent]]:
    if f.degree < 1:
        return [], []
    if f.degree == 1:
        return [f], []
    step = _find_split(f, run, depth)
    if isinstance(step, StalledComponent):
        return [], [step]
    factor = step.factor
    if not factor.divides(f) or not 1 <= factor.degree < f.degree:
        raise InternalInvariantBroken(f"Stage {step.source} reported {factor.to_text()}, not a proper factor.")
    factors, stalled = _factor_component(factor, run, depth)
    more_factors, more_stalled = _factor_component(f // factor, run, depth)
    return factors + more_factors, stalled + more_stalled


def _ordered(polys) -> tuple:
    return tuple(sorted(polys, key=lambda g: (g.degree, g.coeffs)))


def factor_pipeline(f: FpPoly, cfg: RunConfig, *, stages: list[StageReport] | None = None) -> FactorOutcome:
    run = _Run(cfg, stages if stages is not None else [])
    started = time.perf_counter()
    normalized, report = normalize_input(f)
    run.record(
        "normalize",
        f,
        "ok",
        started,
        normalized=normalized.to_text(),
        stripped_repeated=report.stripped_repeated,
        stripped_nonsplitting=report.stripped_nonsplitting,
    )

    factors, stalled = _factor_component(normalized, run, 0)
    product = FpPoly.constant(f.ctx, 1)
    for g in factors + [s.poly for s in stalled]:
        product = product * g
    if product != normalized:
        raise InternalInvariantBroken("Reported factors and stalled components do not multiply to the input.")

    factors_out = _ordered(factors)
    stalled_out = tuple(sorted(stalled, key=lambda s: (s.poly.degree, s.poly.coeffs)))
    if not stalled_out:
        return FullFactorization(normalized, factors_out)
    if factors_out:
        return Partial(normalized, factors_out, stalled_out)
    return Stalled(normalized, stalled_out[0])


def certificate_report(component: StalledComponent) -> CertificateReport:
    certificate = component.certificate
    name = component.poly.to_text()
    if isinstance(certificate, ThinSchemeCertificate):
        return CertificateReport(kind="thin_scheme", component=name, colors=len(certificate.state))
    if isinstance(certificate, SchemeCertificate):
        return CertificateReport(
            kind="scheme",
            component=name,
            colors=len(certificate.state),
            primitive=certificate.verdict.primitive,
            reduction_trail=list(certificate.reduction_trail),
        )
    return CertificateReport(kind="ceiling_abort", component=name, detail=certificate.detail)


def outcome_kind(outcome: FactorOutcome) -> str:
    if isinstance(outcome, FullFactorization):
        return "full_factorization"
    if isinstance(outcome, Partial):
        return "partial"
    return "stalled"


def build_report(f: FpPoly, outcome: FactorOutcome, stages: list[StageReport]) -> FactorReport:
    stalled = () if isinstance(outcome, FullFactorization) else outcome.stalled
    return FactorReport(
        p=f.ctx.p,
        input=f.to_text(),
        normalized=outcome.normalized.to_text(),
        outcome=outcome_kind(outcome),
        stages=stages,
        factors=[g.to_text() for g in outcome.factors],
        stalled=[s.poly.to_text() for s in stalled],
        certificates=[certificate_report(s) for s in stalled],
    )


def run_factor(f: FpPoly, cfg: RunConfig) -> tuple[FactorOutcome, FactorReport]:
    stages: list[StageReport] = []
    outcome = factor_pipeline(f, cfg, stages=stages)
    return outcome, build_report(f, outcome, stages)
