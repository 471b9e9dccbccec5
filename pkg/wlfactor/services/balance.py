"""Sylow root filter and the stronger balance stage.

Both stages branch on the bits of the Sylow signature: for bit k and a known
prefix v of the lower bits, a nonzero a has bit k equal to 0 exactly when
a^((p-1)/2^(k+1)) = eta^(v * 2^(r-1-k)). Applied to f the split separates
roots; applied to g(y, x) in R[y] it separates root differences, and every
leaf is one initial color.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable

from wlfactor.services import ringpoly as rp
from wlfactor.services.errors import InternalInvariantBroken
from wlfactor.services.ffield import FieldCtx, SylowSignature
from wlfactor.services.fppoly import FpPoly, prime_field
from wlfactor.services.tower import (
    DEFAULT_DIMENSION_CEILING,
    Factor,
    FactorFound,
    TowerCtx,
    base_tower,
    evaluate_at_root,
    semisimple_gcd,
)


logger = logging.getLogger(__name__)

IDENTITY_ID = 0


@dataclass(frozen=True)
class ColorPoly:
    id: int
    poly: tuple
    transpose_id: int
    signature: SylowSignature | None = None

    @property
    def degree(self) -> int:
        """Common number of y-roots per virtual idempotent."""
        return rp.degree(self.poly)

    @property
    def is_symmetric(self) -> bool:
        return self.transpose_id == self.id


@dataclass(frozen=True)
class ColorSet:
    f: FpPoly
    tower: TowerCtx
    colors: tuple[ColorPoly, ...]
    identity_id: int | None = None
    _by_id: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {c.id: c for c in self.colors})

    @property
    def ctx(self) -> FieldCtx:
        return self.f.ctx

    @property
    def n(self) -> int:
        return self.f.degree

    def __len__(self) -> int:
        return len(self.colors)

    def __getitem__(self, color_id: int) -> ColorPoly:
        return self._by_id[color_id]

    def ids(self) -> list[int]:
        return [c.id for c in self.colors]

    def transpose_of(self, color: ColorPoly) -> ColorPoly:
        return self._by_id[color.transpose_id]

    @property
    def identity(self) -> ColorPoly | None:
        return None if self.identity_id is None else self._by_id.get(self.identity_id)

    def non_identity(self) -> list[ColorPoly]:
        return [c for c in self.colors if c.id != self.identity_id]


@dataclass(frozen=True)
class AllRootsShareSignature:
    signature: SylowSignature


def zero_root_factor(f: FpPoly) -> Factor | None:
    """x divides f and f has another root: x is a nontrivial factor."""
    if f.degree >= 2 and f.coeffs[0] == 0:
        return Factor(FpPoly.x(f.ctx), "zero_root")
    return None


def build_g(f: FpPoly, tower: TowerCtx | None = None) -> tuple:
    """g(y, x) = (-1)^n f(X - y) / y, monic of degree n - 1 in y over R."""
    tower = tower or base_tower(f)
    ring = tower.top
    f_over_r = rp.trim(ring, [ring.from_int(c) for c in f.coeffs])
    shift = (tower.variable(1), ring.from_int(-1))
    shifted = rp.compose(ring, f_over_r, shift)
    if not shifted or not ring.is_zero(shifted[0]):
        raise InternalInvariantBroken("f(X - y) does not vanish at y = 0; X is not a root of f in R.")
    sign = ring.from_int(-1 if f.degree % 2 else 1)
    return rp.scale(ring, sign, shifted[1:])


def _bit_split(
    ring: Any,
    poly: tuple,
    k: int,
    prefix: int,
    ctx: FieldCtx,
    gcd: Callable[[tuple, tuple], tuple],
) -> tuple[tuple, tuple]:
    """Split a monic poly into the roots with signature bit k equal to 0 and to 1."""
    exponent = (ctx.p - 1) >> (k + 1)
    target = pow(ctx.eta, prefix << (ctx.r - 1 - k), ctx.p)
    variable = rp.monomial(ring, 1)
    test = rp.sub(ring, rp.powmod(ring, variable, exponent, poly), rp.constant(ring, ring.from_int(target)))
    zero_part = gcd(test, poly)
    return zero_part, rp.exact_div(ring, poly, zero_part)


def _branch(
    ring: Any,
    poly: tuple,
    ctx: FieldCtx,
    gcd: Callable[[tuple, tuple], tuple],
) -> list[tuple[int, tuple]]:
    frontier: list[tuple[int, tuple]] = [(0, poly)]
    for k in range(ctx.r):
        following: list[tuple[int, tuple]] = []
        for prefix, current in frontier:
            zero_part, one_part = _bit_split(ring, current, k, prefix, ctx, gcd)
            for bit, part in ((0, zero_part), (1, one_part)):
                if rp.degree(part) >= 1:
                    following.append((prefix | (bit << k), part))
        frontier = following
        logger.debug("Signature bit %s: %s live branches.", k, len(frontier))
    return sorted(frontier, key=lambda item: item[0])


def sylow_root_filter(f: FpPoly, ctx: FieldCtx | None = None) -> Factor | AllRootsShareSignature:
    ctx = ctx or f.ctx
    if f.degree >= 1 and f.coeffs[0] == 0:
        raise InternalInvariantBroken("The Sylow filter needs f(0) != 0; divide out x first.")
    field_ring = prime_field(ctx)
    leaves = _branch(field_ring, f.monic().coeffs, ctx, lambda a, b: rp.gcd(field_ring, a, b))
    if len(leaves) > 1:
        factor = FpPoly(leaves[0][1], ctx)
        logger.info("Sylow filter split f: roots differ in signature (factor degree %s).", factor.degree)
        return Factor(factor, "sylow_filter")
    return AllRootsShareSignature(SylowSignature.from_value(leaves[0][0] if leaves else 0, ctx.r))


def stronger_balance(f: FpPoly, tower: TowerCtx | None = None) -> Factor | ColorSet:
    """Initial colors E: one leaf per full signature of root differences."""
    ctx = f.ctx
    tower = tower or base_tower(f, ceiling=DEFAULT_DIMENSION_CEILING)
    ring = tower.top
    g = build_g(f, tower)
    try:
        leaves = _branch(ring, g, ctx, lambda a, b: semisimple_gcd(a, b, tower, halt=True).gcd)
    except FactorFound as found:
        logger.info("Stronger balance found a zero divisor: factor of degree %s.", found.factor.degree)
        return Factor(found.factor, "stronger_balance")

    top = 1 << (ctx.r - 1)
    ids = {value: index + 1 for index, (value, _) in enumerate(leaves)}
    colors = []
    for value, poly in leaves:
        partner = ids.get(value ^ top)
        if partner is None:
            raise InternalInvariantBroken(f"Initial color with signature {value} has no transpose leaf.")
        colors.append(
            ColorPoly(
                id=ids[value],
                poly=poly,
                transpose_id=partner,
                signature=SylowSignature.from_value(value, ctx.r),
            )
        )
    if sum(c.degree for c in colors) != f.degree - 1:
        raise InternalInvariantBroken("Initial color degrees do not sum to n - 1.")
    logger.info("Stronger balance produced %s initial colors.", len(colors))
    return ColorSet(f=f, tower=tower, colors=tuple(colors))


def augment_with_identity(state: ColorSet) -> ColorSet:
    ring = state.tower.top
    identity = ColorPoly(id=IDENTITY_ID, poly=(ring.zero, ring.one), transpose_id=IDENTITY_ID)
    others = tuple(c for c in state.colors if c.id != IDENTITY_ID)
    return ColorSet(f=state.f, tower=state.tower, colors=(identity,) + others, identity_id=IDENTITY_ID)


def color_roots_at(color: ColorPoly, tower: TowerCtx, root: int, roots: list[int]) -> set[int]:
    """Roots xi_j with g_l(xi_i - xi_j) = 0 at the idempotent of xi_i = ``root``."""
    p = tower.ctx.p
    specialised = [evaluate_at_root(c, tower, [root]) for c in color.poly]
    field_ring = prime_field(tower.ctx)
    return {xj for xj in roots if rp.evaluate(field_ring, tuple(specialised), (root - xj) % p) == 0}
