"""Seeded random instances and an acceptance sweep over them."""

from __future__ import annotations

import logging
import random
from collections import Counter
from typing import Iterator, Sequence

from wlfactor.schemas.config import RunConfig
from wlfactor.schemas.report import SweepSummary, VerificationReport
from wlfactor.services.ffield import make_field_ctx
from wlfactor.services.fppoly import FpPoly, from_roots
from wlfactor.services.verification import verify_run


logger = logging.getLogger(__name__)

DEFAULT_PRIMES = (13, 17, 29, 37, 41, 53, 61, 73, 89, 97, 101, 113)


def random_instance(rng: random.Random, p: int, n: int, *, nonzero_roots: bool = True) -> FpPoly:
    """Monic squarefree f of degree n splitting completely over F_p."""
    low = 1 if nonzero_roots else 0
    if n > p - low:
        raise ValueError(f"Cannot pick {n} distinct roots modulo {p}.")
    return from_roots(sorted(rng.sample(range(low, p), n)), make_field_ctx(p))


def instances(
    seed: int,
    count: int,
    *,
    primes: Sequence[int] = DEFAULT_PRIMES,
    degrees: Sequence[int] = (3, 4, 5, 6, 7, 8),
) -> Iterator[FpPoly]:
    rng = random.Random(seed)
    for _ in range(count):
        p = rng.choice(primes)
        n = rng.choice([d for d in degrees if d < p])
        yield random_instance(rng, p, n)


def sweep(
    seed: int,
    count: int,
    cfg: RunConfig,
    *,
    primes: Sequence[int] = DEFAULT_PRIMES,
    degrees: Sequence[int] = (3, 4, 5, 6, 7, 8),
) -> tuple[SweepSummary, list[VerificationReport]]:
    outcomes: Counter[str] = Counter()
    failed: Counter[str] = Counter()
    reached = 0
    reports = []
    for f in instances(seed, count, primes=primes, degrees=degrees):
        report = verify_run(f, cfg)
        reports.append(report)
        outcomes[report.outcome or "none"] += 1
        failed.update(check.name for check in report.checks if not check.passed)
        if any(check.name == "wl2_partition" for check in report.checks):
            reached += 1
    logger.info("Sweep seed=%s: %s instances, %s failed checks.", seed, count, sum(failed.values()))
    summary = SweepSummary(
        seed=seed,
        instances=len(reports),
        outcomes=dict(sorted(outcomes.items())),
        failed_checks=dict(sorted(failed.items())),
        reached_wl=reached,
    )
    return summary, reports
