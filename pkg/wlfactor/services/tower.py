"""Towers of quotient rings over F_p.

Level 0 is F_p itself; level k is L_{k-1}[v_k]/(m_k) for a monic m_k over
L_{k-1}. A level-k element is a tuple of deg(m_k) level-(k-1) elements,
constant term first, so elements are plain nested tuples that compare and
hash by value. Polynomials over the top ring use the ``ringpoly`` layout.

Inversion never assumes the tower is a field. A nonzero element with a
proper gcd against its modulus raises ``ZeroDivisorFound``; callers turn the
witness into a factor of f or a split of an intermediate modulus.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

from wlfactor.services import ringpoly as rp
from wlfactor.services.errors import (
    BothZero,
    DimensionCeilingExceeded,
    InternalInvariantBroken,
    InvalidWitness,
    ZeroInput,
)
from wlfactor.services.ffield import FieldCtx
from wlfactor.services.fppoly import FpPoly, prime_field


logger = logging.getLogger(__name__)

DEFAULT_DIMENSION_CEILING = 256


@dataclass(frozen=True)
class ZeroDivisorWitness:
    element: Any
    level: int


class ZeroDivisorFound(Exception):
    def __init__(self, witness: ZeroDivisorWitness) -> None:
        self.witness = witness
        super().__init__(f"Zero divisor at tower level {witness.level}")


@dataclass(frozen=True)
class ModulusSplit:
    level: int
    factor: tuple
    cofactor: tuple


class FactorFound(Exception):
    def __init__(self, factor: FpPoly, split: ModulusSplit | None = None) -> None:
        self.factor = factor
        self.split = split
        super().__init__(f"Base factor of degree {factor.degree} found")


@dataclass(frozen=True)
class Factor:
    """A nontrivial monic factor of f found by some stage."""

    factor: FpPoly
    source: str


@dataclass(frozen=True)
class QuotientRing:
    base: Any
    modulus: tuple
    name: str = "v"

    def __post_init__(self) -> None:
        if len(self.modulus) < 2:
            raise InternalInvariantBroken(f"Modulus of level {self.level} must have degree at least 1.")
        if self.modulus[-1] != self.base.one:
            raise InternalInvariantBroken(f"Modulus of level {self.level} must be monic.")

    @property
    def level(self) -> int:
        return self.base.level + 1

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    @property
    def dimension(self) -> int:
        return self.base.dimension * self.degree

    @property
    def zero(self) -> tuple:
        return (self.base.zero,) * self.degree

    @property
    def one(self) -> tuple:
        return self.embed(self.base.one)

    def embed(self, c) -> tuple:
        return (c,) + (self.base.zero,) * (self.degree - 1)

    def variable(self) -> tuple:
        return self.from_poly((self.base.zero, self.base.one))

    def from_int(self, k: int) -> tuple:
        return self.embed(self.base.from_int(k))

    def is_zero(self, a: tuple) -> bool:
        return a == self.zero

    def to_poly(self, a: tuple) -> tuple:
        return rp.trim(self.base, a)

    def from_poly(self, coeffs: Sequence) -> tuple:
        base = self.base
        d = self.degree
        work = list(coeffs)
        for k in range(len(work) - 1, d - 1, -1):
            c = work[k]
            if base.is_zero(c):
                continue
            for i in range(d):
                work[k - d + i] = base.sub(work[k - d + i], base.mul(c, self.modulus[i]))
        work = work[:d]
        return tuple(work) + (base.zero,) * (d - len(work))

    def add(self, a: tuple, b: tuple) -> tuple:
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def sub(self, a: tuple, b: tuple) -> tuple:
        return tuple(self.base.sub(x, y) for x, y in zip(a, b))

    def neg(self, a: tuple) -> tuple:
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a: tuple, b: tuple) -> tuple:
        base = self.base
        out = [base.zero] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if base.is_zero(x):
                continue
            for j, y in enumerate(b):
                if not base.is_zero(y):
                    out[i + j] = base.add(out[i + j], base.mul(x, y))
        return self.from_poly(out)

    def invert(self, a: tuple) -> tuple:
        if self.is_zero(a):
            raise ZeroInput(f"Zero has no inverse at tower level {self.level}.")
        if a == self.one:
            return a
        g, s, _ = rp.ext_gcd(self.base, self.to_poly(a), self.modulus)
        if rp.degree(g) >= 1:
            raise ZeroDivisorFound(ZeroDivisorWitness(element=a, level=self.level))
        return self.from_poly(s)


@dataclass(frozen=True)
class TowerCtx:
    ctx: FieldCtx
    rings: tuple

    @classmethod
    def build(
        cls,
        ctx: FieldCtx,
        moduli: Sequence[Sequence],
        names: Sequence[str] | None = None,
        *,
        ceiling: int = DEFAULT_DIMENSION_CEILING,
    ) -> "TowerCtx":
        tower = cls(ctx, (prime_field(ctx),))
        for k, modulus in enumerate(moduli):
            name = names[k] if names else f"v{k + 1}"
            tower = tower.extend(modulus, name, ceiling=ceiling)
        return tower

    def extend(self, modulus: Sequence, name: str, *, ceiling: int = DEFAULT_DIMENSION_CEILING) -> "TowerCtx":
        ring = QuotientRing(self.top, rp.trim(self.top, modulus), name)
        if ring.dimension > ceiling:
            raise DimensionCeilingExceeded(
                f"Tower dimension {ring.dimension} over F_{self.ctx.p} exceeds the ceiling {ceiling}."
            )
        return TowerCtx(self.ctx, self.rings + (ring,))

    @property
    def top(self):
        return self.rings[-1]

    @property
    def height(self) -> int:
        return len(self.rings) - 1

    @property
    def dimension(self) -> int:
        return self.top.dimension

    @property
    def moduli(self) -> tuple:
        return tuple(ring.modulus for ring in self.rings[1:])

    def embed(self, elem, level: int):
        """View a level-``level`` element as an element of the top ring."""
        for ring in self.rings[level + 1 :]:
            elem = ring.embed(elem)
        return elem

    def variable(self, level: int):
        return self.embed(self.rings[level].variable(), level)

    def with_modulus(self, level: int, modulus: tuple) -> "TowerCtx":
        rings = list(self.rings[:level])
        rings.append(QuotientRing(rings[-1], modulus, self.rings[level].name))
        for old in self.rings[level + 1 :]:
            projected = tuple(_project(c, old.level - 1, rings, level) for c in old.modulus)
            rings.append(QuotientRing(rings[-1], projected, old.name))
        return TowerCtx(self.ctx, tuple(rings))

    def project(self, elem, level: int, component: "TowerCtx", split_level: int):
        return _project(elem, level, component.rings, split_level)

    def lift(self, elem, level: int, component: "TowerCtx", split_level: int):
        """Canonical representative in this tower of an element of ``component``."""
        return _lift(elem, level, self.rings, split_level)

    def flatten(self, elem, level: int | None = None, base_level: int = 0) -> list:
        level = self.height if level is None else level
        if level == base_level:
            return [elem]
        out: list = []
        for c in elem:
            out.extend(self.flatten(c, level - 1, base_level))
        return out

    def unflatten(self, coords: Sequence, level: int | None = None, base_level: int = 0):
        level = self.height if level is None else level
        if level == base_level:
            return coords[0]
        ring = self.rings[level]
        width = len(coords) // ring.degree
        return tuple(
            self.unflatten(coords[i * width : (i + 1) * width], level - 1, base_level) for i in range(ring.degree)
        )

    def rank_over(self, base_level: int) -> int:
        rank = 1
        for ring in self.rings[base_level + 1 :]:
            rank *= ring.degree
        return rank


def _project(elem, level: int, rings: Sequence, split_level: int):
    if level < split_level:
        return elem
    if level == split_level:
        ring = rings[level]
        return ring.from_poly(rp.trim(ring.base, elem))
    return tuple(_project(c, level - 1, rings, split_level) for c in elem)


def _lift(elem, level: int, rings: Sequence, split_level: int):
    if level < split_level:
        return elem
    if level == split_level:
        return rings[level].from_poly(elem)
    return tuple(_lift(c, level - 1, rings, split_level) for c in elem)


def base_tower(f: FpPoly, *, name: str = "x", ceiling: int = DEFAULT_DIMENSION_CEILING) -> TowerCtx:
    return TowerCtx.build(f.ctx, [f.coeffs], [name], ceiling=ceiling)


def invert(a, tower: TowerCtx):
    """Inverse of ``a`` in the top ring, or the witness that blocked it."""
    try:
        return tower.top.invert(a)
    except ZeroDivisorFound as exc:
        return exc.witness


def split_on_witness(witness: ZeroDivisorWitness, tower: TowerCtx) -> ModulusSplit:
    """Walk a witness down the tower until some modulus splits properly."""
    level, value = witness.level, witness.element
    while True:
        ring = tower.rings[level]
        try:
            g = rp.gcd(ring.base, ring.to_poly(value), ring.modulus)
        except ZeroDivisorFound as exc:
            logger.debug("Witness at level %s descended to level %s.", level, exc.witness.level)
            level, value = exc.witness.level, exc.witness.element
            continue
        if rp.degree(g) <= 0 or rp.degree(g) >= ring.degree:
            raise InvalidWitness(f"Witness at level {level} shares no proper factor with its modulus.")
        return ModulusSplit(level=level, factor=g, cofactor=rp.exact_div(ring.base, ring.modulus, g))


def witness_to_base_factor(witness: ZeroDivisorWitness, tower: TowerCtx) -> FpPoly | ModulusSplit:
    split = split_on_witness(witness, tower)
    if split.level == 1:
        return FpPoly(split.factor, tower.ctx)
    return split


def crt_idempotents(ring: QuotientRing, factor: tuple, cofactor: tuple) -> tuple[tuple, tuple]:
    """(e1, e2) in ``ring`` with e1 = 1 mod factor, 0 mod cofactor, and e2 the reverse."""
    g, s, t = rp.ext_gcd(ring.base, factor, cofactor)
    if rp.degree(g) != 0:
        raise InternalInvariantBroken(f"Modulus split at level {ring.level} is not coprime.")
    e1 = ring.from_poly(rp.mul(ring.base, t, cofactor))
    e2 = ring.from_poly(rp.mul(ring.base, s, factor))
    return e1, e2


@dataclass(frozen=True)
class GcdResult:
    gcd: tuple
    splits: tuple[ModulusSplit, ...] = ()


def semisimple_gcd(a: tuple, b: tuple, tower: TowerCtx, *, halt: bool = True) -> GcdResult:
    """Componentwise gcd over a product of fields, splitting the tower on zero divisors.

    In halt mode a split of the level-1 modulus raises ``FactorFound``.
    """
    top = tower.top
    if not a and not b:
        raise BothZero("gcd of two zero polynomials.")
    try:
        return GcdResult(rp.gcd(top, a, b))
    except ZeroDivisorFound as exc:
        split = split_on_witness(exc.witness, tower)

    while True:
        if split.level == 1 and halt:
            raise FactorFound(FpPoly(split.factor, tower.ctx), split)
        try:
            e1, e2 = crt_idempotents(tower.rings[split.level], split.factor, split.cofactor)
            break
        except ZeroDivisorFound as exc:
            split = split_on_witness(exc.witness, tower)

    logger.debug(
        "Splitting level-%s modulus into degrees %s and %s.",
        split.level,
        rp.degree(split.factor),
        rp.degree(split.cofactor),
    )
    combined: tuple = ()
    splits: list[ModulusSplit] = [split]
    for modulus, idempotent in ((split.factor, e1), (split.cofactor, e2)):
        component = tower.with_modulus(split.level, modulus)
        pa = rp.trim(component.top, [tower.project(c, tower.height, component, split.level) for c in a])
        pb = rp.trim(component.top, [tower.project(c, tower.height, component, split.level) for c in b])
        if not pa and not pb:
            continue
        part = semisimple_gcd(pa, pb, component, halt=halt)
        splits.extend(part.splits)
        lifted = tuple(tower.lift(c, tower.height, component, split.level) for c in part.gcd)
        weight = tower.embed(idempotent, split.level)
        combined = rp.add(top, combined, rp.scale(top, weight, lifted))
    return GcdResult(combined, tuple(splits))


def charpoly_of_multiplication(
    a,
    tower: TowerCtx,
    base_level: int = 0,
    *,
    ceiling: int = DEFAULT_DIMENSION_CEILING,
) -> tuple:
    """Characteristic polynomial of x -> a*x on the top ring as a free module over level ``base_level``."""
    if tower.dimension > ceiling:
        raise DimensionCeilingExceeded(
            f"Tower dimension {tower.dimension} over F_{tower.ctx.p} exceeds the ceiling {ceiling}."
        )
    base = tower.rings[base_level]
    rank = tower.rank_over(base_level)
    columns = []
    for j in range(rank):
        unit = [base.zero] * rank
        unit[j] = base.one
        basis_elem = tower.unflatten(unit, base_level=base_level)
        columns.append(tower.flatten(tower.top.mul(a, basis_elem), base_level=base_level))
    matrix = [[columns[j][i] for j in range(rank)] for i in range(rank)]
    return rp.berkowitz(base, matrix)


def evaluate_at_root(elem, tower: TowerCtx, point: Sequence[int], level: int | None = None) -> int:
    """Image of ``elem`` under the homomorphism sending v_k to point[k-1]."""
    level = tower.height if level is None else level
    if level == 0:
        return elem
    p = tower.ctx.p
    acc = 0
    for c in reversed(elem):
        acc = (acc * point[level - 1] + evaluate_at_root(c, tower, point, level - 1)) % p
    return acc
