"""Prime-field arithmetic and the 2-Sylow structure of F_p*.

Residues are canonical ints in [0, p). With p - 1 = 2^r * w (w odd), every
nonzero a has a^w in the cyclic 2-group generated by eta = gamma^w, so
a^w = eta^u for a unique u in [0, 2^r). The bits of u are the Sylow
signature that drives the balance stage.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import isqrt
from typing import Sequence

from wlfactor.services.errors import (
    FieldTooLarge,
    NonResidueScanExhausted,
    NotPrime,
    ZeroInput,
)


logger = logging.getLogger(__name__)

MAX_MODULUS_BITS = 62
DEFAULT_SCAN_CONSTANT = 4


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def euler_criterion(a: int, p: int) -> int:
    return pow(a % p, (p - 1) // 2, p)


def is_quadratic_residue(a: int, p: int) -> bool:
    a %= p
    return a == 0 or euler_criterion(a, p) == 1


def _two_adic_split(n: int) -> tuple[int, int]:
    r = 0
    while n % 2 == 0:
        n //= 2
        r += 1
    return r, n


def nonresidue_scan_bound(p: int, scan_constant: int = DEFAULT_SCAN_CONSTANT) -> int:
    log2_ceil = (p - 1).bit_length()
    return min(p - 1, scan_constant * log2_ceil * log2_ceil)


@dataclass(frozen=True)
class FieldCtx:
    p: int
    r: int
    w: int
    gamma: int
    eta: int

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroInput("Zero has no inverse modulo p.")
        return pow(a, -1, self.p)


@dataclass(frozen=True)
class SylowSignature:
    bits: tuple[int, ...]

    @classmethod
    def from_value(cls, u: int, r: int) -> "SylowSignature":
        if not 0 <= u < (1 << r):
            raise ValueError(f"Signature value {u} does not fit in {r} bits.")
        return cls(tuple((u >> k) & 1 for k in range(r)))

    @property
    def value(self) -> int:
        return sum(bit << k for k, bit in enumerate(self.bits))

    @property
    def r(self) -> int:
        return len(self.bits)

    def flip_top(self) -> "SylowSignature":
        return SylowSignature(self.bits[:-1] + (1 - self.bits[-1],))


def make_field_ctx(
    p: int,
    *,
    scan_constant: int = DEFAULT_SCAN_CONSTANT,
    allow_full_scan: bool = False,
) -> FieldCtx:
    if p.bit_length() > MAX_MODULUS_BITS:
        raise FieldTooLarge(f"Modulus {p} exceeds {MAX_MODULUS_BITS} bits.")
    if p == 2 or not is_prime(p):
        raise NotPrime(f"{p} is not an odd prime.")

    r, w = _two_adic_split(p - 1)
    bound = nonresidue_scan_bound(p, scan_constant)
    gamma = next((b for b in range(2, bound + 1) if euler_criterion(b, p) == p - 1), None)
    if gamma is None and allow_full_scan:
        logger.warning("Non-residue scan bound %s exhausted for p=%s; falling back to full scan.", bound, p)
        gamma = next((b for b in range(bound + 1, p) if euler_criterion(b, p) == p - 1), None)
    if gamma is None:
        raise NonResidueScanExhausted(
            f"No quadratic non-residue modulo {p} below {bound}; ERH-scale anomaly or arithmetic bug."
        )

    ctx = FieldCtx(p=p, r=r, w=w, gamma=gamma, eta=pow(gamma, w, p))
    logger.debug("Field context p=%s r=%s w=%s gamma=%s eta=%s", p, r, w, gamma, ctx.eta)
    return ctx


def sylow_signature(a: int, ctx: FieldCtx) -> SylowSignature:
    """Recover u with a^w = eta^u bit by bit in the cyclic 2-group <eta>."""
    p = ctx.p
    a %= p
    if a == 0:
        raise ZeroInput("The Sylow signature of zero is undefined.")

    target = pow(a, ctx.w, p)
    eta_inv = pow(ctx.eta, -1, p)
    u = 0
    for k in range(ctx.r):
        residual = target * pow(eta_inv, u, p) % p
        if pow(residual, 1 << (ctx.r - 1 - k), p) != 1:
            u |= 1 << k
    return SylowSignature.from_value(u, ctx.r)


def negation_flips_top_bit(a: int, ctx: FieldCtx) -> bool:
    if a % ctx.p == 0:
        raise ZeroInput("Negation test needs a nonzero residue.")
    top = 1 << (ctx.r - 1)
    return sylow_signature(-a, ctx).value == sylow_signature(a, ctx).value ^ top


def stronger_balance_sets(roots: Sequence[int], ctx: FieldCtx) -> list[list[frozenset[int]]]:
    """D_i^k: the roots xi_j whose difference xi_i - xi_j has signature bit k equal to 0."""
    result: list[list[frozenset[int]]] = []
    for xi in roots:
        signatures = {xj: sylow_signature(xi - xj, ctx) for xj in roots if xj != xi}
        result.append(
            [frozenset(xj for xj, sig in signatures.items() if sig.bits[k] == 0) for k in range(ctx.r)]
        )
    return result


def gao_square_balance_sets(roots: Sequence[int], ctx: FieldCtx) -> list[frozenset[int]]:
    """D_i: the roots xi_j with xi_i - xi_j a square, i.e. the top signature bit is 0."""
    return [sets[ctx.r - 1] for sets in stronger_balance_sets(roots, ctx)]


def balance_profile(roots: Sequence[int], ctx: FieldCtx) -> list[tuple[int, ...]]:
    return [tuple(len(d) for d in sets) for sets in stronger_balance_sets(roots, ctx)]


def is_stronger_balanced(roots: Sequence[int], ctx: FieldCtx) -> bool:
    return len(set(balance_profile(roots, ctx))) <= 1


def is_square_balanced(roots: Sequence[int], ctx: FieldCtx) -> bool:
    half = (len(roots) - 1) / 2
    return all(len(d) == half for d in gao_square_balance_sets(roots, ctx))


@dataclass(frozen=True)
class PrimeField:
    """F_p as a level-0 ring object; elements are canonical ints."""

    ctx: FieldCtx

    level = 0
    zero = 0
    one = 1
    degree = 1

    @property
    def dimension(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.ctx.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.ctx.p

    def neg(self, a: int) -> int:
        return -a % self.ctx.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.ctx.p

    def from_int(self, k: int) -> int:
        return k % self.ctx.p

    def is_zero(self, a: int) -> bool:
        return a == 0

    def invert(self, a: int) -> int:
        return self.ctx.inv(a)
