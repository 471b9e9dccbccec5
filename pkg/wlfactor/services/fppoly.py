"""Dense univariate polynomials over F_p and the desk-scale root oracle."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from wlfactor.services import ringpoly as rp
from wlfactor.services.errors import (
    DegenerateInput,
    MalformedInput,
    OracleBoundExceeded,
    TrivialResult,
    ZeroInput,
)
from wlfactor.services.ffield import FieldCtx, PrimeField


logger = logging.getLogger(__name__)

DEFAULT_ORACLE_BOUND = 10**6


@lru_cache(maxsize=64)
def prime_field(ctx: FieldCtx) -> PrimeField:
    return PrimeField(ctx)


@dataclass(frozen=True)
class FpPoly:
    coeffs: tuple[int, ...]
    ctx: FieldCtx

    def __post_init__(self) -> None:
        p = self.ctx.p
        if any(not 0 <= c < p for c in self.coeffs):
            raise ValueError(f"Coefficients must be canonical residues modulo {p}.")
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("Coefficient vector has trailing zeros.")

    @classmethod
    def of(cls, ctx: FieldCtx, values: Iterable[int]) -> "FpPoly":
        return cls(rp.from_ints(prime_field(ctx), list(values)), ctx)

    @classmethod
    def x(cls, ctx: FieldCtx) -> "FpPoly":
        return cls((0, 1), ctx)

    @classmethod
    def constant(cls, ctx: FieldCtx, c: int) -> "FpPoly":
        return cls.of(ctx, [c])

    @classmethod
    def from_text(cls, text: str, ctx: FieldCtx) -> "FpPoly":
        parts = [item.strip() for item in text.split(",")]
        if not text.strip() or any(not item for item in parts):
            raise MalformedInput(f"Polynomial text must be comma-separated integers, got: {text!r}")
        try:
            values = [int(item) for item in parts]
        except ValueError as exc:
            raise MalformedInput(f"Polynomial text must be comma-separated integers, got: {text!r}") from exc
        return cls.of(ctx, values)

    def to_text(self) -> str:
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    @property
    def field(self) -> PrimeField:
        return prime_field(self.ctx)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        if not self.coeffs:
            raise ZeroInput("The zero polynomial has no leading coefficient.")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def _wrap(self, coeffs: tuple) -> "FpPoly":
        return FpPoly(coeffs, self.ctx)

    def __add__(self, other: "FpPoly") -> "FpPoly":
        return self._wrap(rp.add(self.field, self.coeffs, other.coeffs))

    def __sub__(self, other: "FpPoly") -> "FpPoly":
        return self._wrap(rp.sub(self.field, self.coeffs, other.coeffs))

    def __neg__(self) -> "FpPoly":
        return self._wrap(rp.neg(self.field, self.coeffs))

    def __mul__(self, other: "FpPoly") -> "FpPoly":
        return self._wrap(rp.mul(self.field, self.coeffs, other.coeffs))

    def __pow__(self, e: int) -> "FpPoly":
        return self._wrap(rp.power(self.field, self.coeffs, e))

    def __divmod__(self, other: "FpPoly") -> tuple["FpPoly", "FpPoly"]:
        quot, remainder = rp.poly_divmod(self.field, self.coeffs, other.coeffs)
        return self._wrap(quot), self._wrap(remainder)

    def __floordiv__(self, other: "FpPoly") -> "FpPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "FpPoly") -> "FpPoly":
        return divmod(self, other)[1]

    def __call__(self, a: int) -> int:
        return rp.evaluate(self.field, self.coeffs, a % self.ctx.p)

    def scale(self, c: int) -> "FpPoly":
        return self._wrap(rp.scale(self.field, c % self.ctx.p, self.coeffs))

    def monic(self) -> "FpPoly":
        return self._wrap(rp.make_monic(self.field, self.coeffs))

    def derivative(self) -> "FpPoly":
        return self._wrap(rp.derivative(self.field, self.coeffs))

    def compose(self, inner: "FpPoly", modulus: "FpPoly | None" = None) -> "FpPoly":
        return self._wrap(
            rp.compose(self.field, self.coeffs, inner.coeffs, None if modulus is None else modulus.coeffs)
        )

    def divides(self, other: "FpPoly") -> bool:
        return (other % self).is_zero()


def poly_gcd(a: FpPoly, b: FpPoly) -> FpPoly:
    return a._wrap(rp.gcd(a.field, a.coeffs, b.coeffs))


def ext_gcd(a: FpPoly, b: FpPoly) -> tuple[FpPoly, FpPoly, FpPoly]:
    g, s, t = rp.ext_gcd(a.field, a.coeffs, b.coeffs)
    return a._wrap(g), a._wrap(s), a._wrap(t)


def pow_mod(base: FpPoly, e: int, modulus: FpPoly) -> FpPoly:
    return base._wrap(rp.powmod(base.field, base.coeffs, e, modulus.coeffs))


def is_squarefree(f: FpPoly) -> bool:
    if f.degree < 1:
        return not f.is_zero()
    fprime = f.derivative()
    return not fprime.is_zero() and poly_gcd(f, fprime).is_one()


def from_roots(roots: Iterable[int], ctx: FieldCtx) -> FpPoly:
    result = FpPoly.constant(ctx, 1)
    for a in roots:
        result = result * FpPoly.of(ctx, [-a, 1])
    return result


def interpolate(points: Sequence[tuple[int, int]], ctx: FieldCtx) -> FpPoly:
    """Lagrange interpolation through (x_i, y_i) with distinct x_i."""
    xs = [x % ctx.p for x, _ in points]
    if len(set(xs)) != len(xs):
        raise MalformedInput("Interpolation nodes must be distinct modulo p.")
    result = FpPoly.of(ctx, [])
    for i, (xi, yi) in enumerate(points):
        others = xs[:i] + xs[i + 1 :]
        basis = from_roots(others, ctx)
        denom = basis(xi)
        result = result + basis.scale(yi * ctx.inv(denom))
    return result


@dataclass(frozen=True)
class NormalizationReport:
    input_degree: int
    leading_coefficient: int
    squarefree_degree: int
    splitting_degree: int

    @property
    def stripped_repeated(self) -> int:
        return self.input_degree - self.squarefree_degree

    @property
    def stripped_nonsplitting(self) -> int:
        return self.squarefree_degree - self.splitting_degree


def _radical(g: FpPoly) -> FpPoly:
    """Product of the distinct monic irreducible factors of the monic g."""
    if g.degree < 1:
        return g
    gprime = g.derivative()
    if gprime.is_zero():
        # g = v(x^p) = v(x)^p over F_p
        return _radical(FpPoly.of(g.ctx, g.coeffs[:: g.ctx.p]))
    repeated = poly_gcd(g, gprime)
    coprime_part = g // repeated
    rest = repeated
    shared = poly_gcd(rest, coprime_part)
    while not shared.is_one():
        rest = rest // shared
        shared = poly_gcd(rest, coprime_part)
    return coprime_part * _radical(rest)


def normalize_input(g: FpPoly) -> tuple[FpPoly, NormalizationReport]:
    """Monic, squarefree, completely splitting part of g."""
    if g.degree < 1:
        raise DegenerateInput(f"Input must have degree at least 1, got degree {g.degree}.")
    monic = g.monic()
    squarefree = _radical(monic)
    x = FpPoly.x(g.ctx)
    frobenius = pow_mod(x, g.ctx.p, squarefree) - x
    f = poly_gcd(frobenius, squarefree)
    report = NormalizationReport(
        input_degree=g.degree,
        leading_coefficient=g.lc,
        squarefree_degree=squarefree.degree,
        splitting_degree=f.degree,
    )
    if f != monic:
        logger.info(
            "Normalisation stripped %s repeated and %s non-splitting degrees.",
            report.stripped_repeated,
            report.stripped_nonsplitting,
        )
    return f, report


def squarefree_decompose(g: FpPoly) -> list[tuple[FpPoly, int]]:
    if g.degree < 1:
        raise DegenerateInput("Squarefree decomposition needs degree at least 1.")
    return [(g._wrap(h), m) for h, m in rp.yun(g.field, g.coeffs)]


def brute_force_roots(f: FpPoly, *, oracle_bound: int = DEFAULT_ORACLE_BOUND) -> list[int]:
    if f.is_zero():
        raise ZeroInput("Every residue is a root of the zero polynomial.")
    if f.ctx.p > oracle_bound:
        raise OracleBoundExceeded(f"p={f.ctx.p} exceeds the oracle bound {oracle_bound}.")
    return [a for a in range(f.ctx.p) if f(a) == 0]


def multiplication_matrix(h: FpPoly, f: FpPoly) -> list[list[int]]:
    """Matrix of multiplication by h on F_p[x]/(f) in the basis 1, x, ..., x^(n-1)."""
    n = f.degree
    column = h % f
    columns = []
    x = FpPoly.x(f.ctx)
    for _ in range(n):
        columns.append(list(column.coeffs) + [0] * (n - len(column.coeffs)))
        column = (column * x) % f
    return [[columns[j][i] for j in range(n)] for i in range(n)]


def resultant_via_charpoly(h: FpPoly, f: FpPoly) -> FpPoly:
    """prod (z - h(xi_i)) over the roots of f, as the characteristic polynomial of h(C_f)."""
    if f.degree < 1:
        raise DegenerateInput("The modulus must have degree at least 1.")
    matrix = multiplication_matrix(h, f)
    return f._wrap(rp.berkowitz(f.field, matrix))


def build_fq(f: FpPoly, q: FpPoly) -> FpPoly:
    return resultant_via_charpoly(q, f)


def lift_factor(g_q: FpPoly, q: FpPoly, f: FpPoly) -> FpPoly:
    lifted = poly_gcd(g_q.compose(q, f), f)
    if lifted.degree < 1 or (lifted.degree == f.degree and g_q.degree < f.degree):
        raise TrivialResult(
            f"Lifting a degree-{g_q.degree} factor through q gave a trivial factor of f; is f_q squarefree?"
        )
    return lifted
