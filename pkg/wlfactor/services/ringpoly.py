"""Dense univariate polynomials over any commutative ring object.

A polynomial is a tuple of ring elements, constant term first, with no
trailing zeros; the zero polynomial is the empty tuple. Every leading
coefficient inversion goes through ``ring.invert``, so over a quotient ring
with zero divisors the ring's own exception surfaces unchanged.

The ring protocol: ``zero``, ``one``, ``add``, ``sub``, ``neg``, ``mul``,
``invert``, ``from_int``, ``is_zero``.
"""

from __future__ import annotations

from typing import Any, Sequence

from wlfactor.services.errors import BothZero, InternalInvariantBroken, MultiplicityOverflow, ZeroInput


Poly = tuple


def trim(ring: Any, coeffs: Sequence) -> Poly:
    end = len(coeffs)
    while end and ring.is_zero(coeffs[end - 1]):
        end -= 1
    return tuple(coeffs[:end])


def degree(a: Poly) -> int:
    return len(a) - 1


def constant(ring: Any, c) -> Poly:
    return trim(ring, (c,))


def monomial(ring: Any, k: int, c=None) -> Poly:
    c = ring.one if c is None else c
    return trim(ring, (ring.zero,) * k + (c,))


def from_ints(ring: Any, values: Sequence[int]) -> Poly:
    return trim(ring, [ring.from_int(v) for v in values])


def add(ring: Any, a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = ring.add(out[i], c)
    return trim(ring, out)


def neg(ring: Any, a: Poly) -> Poly:
    return tuple(ring.neg(c) for c in a)


def sub(ring: Any, a: Poly, b: Poly) -> Poly:
    return add(ring, a, neg(ring, b))


def scale(ring: Any, c, a: Poly) -> Poly:
    return trim(ring, [ring.mul(c, x) for x in a])


def mul(ring: Any, a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [ring.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if ring.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = ring.add(out[i + j], ring.mul(x, y))
    return trim(ring, out)


def power(ring: Any, a: Poly, e: int) -> Poly:
    result: Poly = constant(ring, ring.one)
    while e:
        if e & 1:
            result = mul(ring, result, a)
        e >>= 1
        if e:
            a = mul(ring, a, a)
    return result


def poly_divmod(ring: Any, a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroInput("Polynomial division by zero.")
    work = list(a)
    db = len(b) - 1
    if len(work) <= db:
        return (), trim(ring, work)
    lead_inv = ring.invert(b[-1])
    quot = [ring.zero] * (len(work) - db)
    for k in range(len(work) - 1, db - 1, -1):
        c = ring.mul(work[k], lead_inv)
        if ring.is_zero(c):
            continue
        quot[k - db] = c
        for i, y in enumerate(b):
            work[k - db + i] = ring.sub(work[k - db + i], ring.mul(c, y))
    return trim(ring, quot), trim(ring, work[:db])


def rem(ring: Any, a: Poly, b: Poly) -> Poly:
    return poly_divmod(ring, a, b)[1]


def exact_div(ring: Any, a: Poly, b: Poly) -> Poly:
    quot, remainder = poly_divmod(ring, a, b)
    if remainder:
        raise InternalInvariantBroken("Exact polynomial division left a remainder.")
    return quot


def make_monic(ring: Any, a: Poly) -> Poly:
    if not a:
        raise ZeroInput("The zero polynomial has no monic normalisation.")
    return scale(ring, ring.invert(a[-1]), a)


def gcd(ring: Any, a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm; gcd(a, 0) = monic(a)."""
    if not a and not b:
        raise BothZero("gcd of two zero polynomials.")
    while b:
        a, b = b, rem(ring, a, b)
    return make_monic(ring, a)


def ext_gcd(ring: Any, a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with s*a + t*b = g and g monic."""
    if not a and not b:
        raise BothZero("Extended gcd of two zero polynomials.")
    r0, r1 = a, b
    s0, s1 = constant(ring, ring.one), ()
    t0, t1 = (), constant(ring, ring.one)
    while r1:
        q, r2 = poly_divmod(ring, r0, r1)
        r0, r1 = r1, r2
        s0, s1 = s1, sub(ring, s0, mul(ring, q, s1))
        t0, t1 = t1, sub(ring, t0, mul(ring, q, t1))
    lead_inv = ring.invert(r0[-1])
    return scale(ring, lead_inv, r0), scale(ring, lead_inv, s0), scale(ring, lead_inv, t0)


def derivative(ring: Any, a: Poly) -> Poly:
    return trim(ring, [ring.mul(ring.from_int(i), c) for i, c in enumerate(a)][1:])


def evaluate(ring: Any, a: Poly, x):
    acc = ring.zero
    for c in reversed(a):
        acc = ring.add(ring.mul(acc, x), c)
    return acc


def compose(ring: Any, a: Poly, b: Poly, modulus: Poly | None = None) -> Poly:
    """a(b) by Horner, reduced by ``modulus`` after every step when given."""
    acc: Poly = ()
    for c in reversed(a):
        acc = add(ring, mul(ring, acc, b), constant(ring, c))
        if modulus is not None:
            acc = rem(ring, acc, modulus)
    return acc


def powmod(ring: Any, base: Poly, e: int, modulus: Poly) -> Poly:
    result = rem(ring, constant(ring, ring.one), modulus)
    base = rem(ring, base, modulus)
    for bit in bin(e)[2:]:
        result = rem(ring, mul(ring, result, result), modulus)
        if bit == "1":
            result = rem(ring, mul(ring, result, base), modulus)
    return result


def yun(ring: Any, a: Poly) -> list[tuple[Poly, int]]:
    """Squarefree decomposition of a monic polynomial: [(h_m, m), ...] with a = prod h_m^m."""
    if degree(a) < 1:
        return []
    a = make_monic(ring, a)
    da = derivative(ring, a)
    if not da:
        raise MultiplicityOverflow("Derivative vanishes; every multiplicity is divisible by the characteristic.")
    b = gcd(ring, a, da)
    c = exact_div(ring, a, b)
    d = sub(ring, exact_div(ring, da, b), derivative(ring, c))
    parts: list[tuple[Poly, int]] = []
    m = 1
    while degree(c) >= 1 and m <= degree(a):
        h = gcd(ring, c, d)
        c = exact_div(ring, c, h)
        d = sub(ring, exact_div(ring, d, h), derivative(ring, c))
        if degree(h) >= 1:
            parts.append((h, m))
        m += 1

    rebuilt: Poly = constant(ring, ring.one)
    for h, k in parts:
        rebuilt = mul(ring, rebuilt, power(ring, h, k))
    if rebuilt != a:
        raise MultiplicityOverflow("Squarefree parts do not rebuild the input; a multiplicity reached the characteristic.")
    return parts


def berkowitz(ring: Any, matrix: Sequence[Sequence]) -> Poly:
    """Division-free characteristic polynomial det(wI - M), constant term first."""
    n = len(matrix)
    vec = [ring.one]
    for k in range(n - 1, -1, -1):
        size = n - k
        row = matrix[k][k + 1 :]
        col = [matrix[i][k] for i in range(k + 1, n)]
        sub_block = [list(matrix[i][k + 1 :]) for i in range(k + 1, n)]

        diagonal = [ring.one, ring.neg(matrix[k][k])]
        current = col
        for _ in range(size - 1):
            diagonal.append(ring.neg(_dot(ring, row, current)))
            current = [_dot(ring, sub_row, current) for sub_row in sub_block]

        vec = [
            _dot(ring, [diagonal[i - j] for j in range(min(i + 1, len(vec)))], vec[: min(i + 1, len(vec))])
            for i in range(size + 1)
        ]
    return trim(ring, list(reversed(vec)))


def _dot(ring: Any, xs: Sequence, ys: Sequence):
    acc = ring.zero
    for x, y in zip(xs, ys):
        acc = ring.add(acc, ring.mul(x, y))
    return acc
