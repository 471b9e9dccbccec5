import random

import pytest

from wlfactor.services import ringpoly as rp
from wlfactor.services import tower as tw
from wlfactor.services.errors import DimensionCeilingExceeded, InvalidWitness
from wlfactor.services.ffield import make_field_ctx
from wlfactor.services.fppoly import FpPoly, from_roots, interpolate


CTX = make_field_ctx(13)
CUBE = FpPoly.of(CTX, [-1, 0, 0, 1])
R = tw.base_tower(CUBE)
RING = R.top


def _elem(*coeffs):
    return RING.from_poly([c % 13 for c in coeffs])


def _ypoly(*coeffs):
    return rp.trim(RING, coeffs)


X = _elem(0, 1)
ONE = RING.one


def test_invert_cases():
    assert tw.invert(RING.from_int(2), R) == RING.from_int(7)
    assert tw.invert(X, R) == _elem(0, 0, 1)
    witness = tw.invert(_elem(-1, 1), R)
    assert witness == tw.ZeroDivisorWitness(element=_elem(-1, 1), level=1)


def test_invert_times_element_is_one():
    rng = random.Random(5)
    f = from_roots([2, 6, 7, 11], CTX)
    tower = tw.base_tower(f)
    for _ in range(30):
        a = tower.top.from_poly([rng.randrange(13) for _ in range(4)])
        if tower.top.is_zero(a):
            continue
        inv = tw.invert(a, tower)
        if isinstance(inv, tw.ZeroDivisorWitness):
            assert tw.witness_to_base_factor(inv, tower).divides(f)
        else:
            assert tower.top.mul(a, inv) == tower.top.one


def test_witness_to_base_factor_direct_gcd():
    witness = tw.ZeroDivisorWitness(element=_elem(-1, 1), level=1)
    assert tw.witness_to_base_factor(witness, R) == FpPoly.of(CTX, [-1, 1])


def test_witness_to_base_factor_returns_modulus_split_above_base():
    # g(y) = (y - x)(y - x^2) = y^2 - (x + x^2) y + 1 over R.
    g = _ypoly(ONE, _elem(0, -1, -1), ONE)
    tower = R.extend(g, "y")
    witness = tw.ZeroDivisorWitness(element=tower.top.from_poly([RING.neg(X), ONE]), level=2)
    split = tw.witness_to_base_factor(witness, tower)
    assert split == tw.ModulusSplit(
        level=2,
        factor=_ypoly(RING.neg(X), ONE),
        cofactor=_ypoly(_elem(0, 0, -1), ONE),
    )


def test_invertible_witness_is_rejected():
    with pytest.raises(InvalidWitness):
        tw.witness_to_base_factor(tw.ZeroDivisorWitness(element=X, level=1), R)


def test_semisimple_gcd_cases():
    y_minus_x = _ypoly(RING.neg(X), ONE)
    y_minus_one = _ypoly(RING.from_int(-1), ONE)
    assert tw.semisimple_gcd(y_minus_x, y_minus_x, R).gcd == y_minus_x
    product = rp.mul(RING, y_minus_one, y_minus_x)
    assert tw.semisimple_gcd(product, y_minus_one, R).gcd == y_minus_one

    with pytest.raises(tw.FactorFound) as caught:
        tw.semisimple_gcd(y_minus_x, y_minus_one, R, halt=True)
    assert caught.value.factor == FpPoly.of(CTX, [-1, 1])


def test_semisimple_gcd_split_mode_is_componentwise():
    y_minus_x = _ypoly(RING.neg(X), ONE)
    y_minus_one = _ypoly(RING.from_int(-1), ONE)
    result = tw.semisimple_gcd(y_minus_x, y_minus_one, R, halt=False)
    assert result.splits[0].level == 1
    at = {root: [tw.evaluate_at_root(c, R, [root]) for c in result.gcd] for root in (1, 3, 9)}
    assert at[1] == [12, 1]
    assert at[3] == [1, 0]
    assert at[9] == [1, 0]


def _interpolated_ypoly(tower, roots, per_root):
    width = max(len(coeffs) for coeffs in per_root)
    padded = [list(coeffs) + [0] * (width - len(coeffs)) for coeffs in per_root]
    column_polys = [interpolate(list(zip(roots, [row[k] for row in padded])), CTX) for k in range(width)]
    return rp.trim(tower.top, [tower.top.from_poly(h.coeffs) for h in column_polys])


def test_semisimple_gcd_matches_gcd_at_every_root():
    rng = random.Random(17)
    for _ in range(100):
        roots = rng.sample(range(1, 13), 4)
        f = from_roots(roots, CTX)
        tower = tw.base_tower(f)
        a_rows, b_rows = [], []
        for _ in roots:
            shared = [rng.randrange(13) for _ in range(rng.randrange(3))]
            a_rows.append(from_roots(shared + [rng.randrange(13)], CTX).coeffs)
            b_rows.append(from_roots(shared + [rng.randrange(13) for _ in range(rng.randrange(2))], CTX).coeffs)
        a = _interpolated_ypoly(tower, roots, a_rows)
        b = _interpolated_ypoly(tower, roots, b_rows)
        result = tw.semisimple_gcd(a, b, tower, halt=False)
        for root, a_row, b_row in zip(roots, a_rows, b_rows):
            expected = list(rp.gcd(tower.rings[0], a_row, b_row))
            got = [tw.evaluate_at_root(c, tower, [root]) for c in result.gcd]
            assert rp.trim(tower.rings[0], got) == tuple(expected)


def test_charpoly_of_multiplication_cases():
    assert tw.charpoly_of_multiplication(X, R) == CUBE.coeffs
    assert tw.charpoly_of_multiplication(RING.add(X, ONE), R) == FpPoly.of(CTX, [11, 3, 10, 1]).coeffs

    tower = R.extend(_ypoly(RING.neg(X), RING.zero, ONE), "y")
    five = tower.embed(RING.from_int(5), 1)
    assert tw.charpoly_of_multiplication(five, tower) == rp.power(tower.rings[0], (8, 1), 6)
    y = tower.variable(2)
    assert tw.charpoly_of_multiplication(y, tower, base_level=1) == _ypoly(RING.neg(X), RING.zero, ONE)


def test_charpoly_equals_modulus_for_random_f():
    rng = random.Random(23)
    for _ in range(100):
        f = FpPoly.of(CTX, [rng.randrange(13) for _ in range(rng.randrange(1, 6))] + [1])
        tower = tw.base_tower(f)
        assert tw.charpoly_of_multiplication(tower.variable(1), tower) == f.coeffs


def test_dimension_ceiling():
    with pytest.raises(DimensionCeilingExceeded):
        R.extend(_ypoly(RING.neg(X), RING.zero, ONE), "y", ceiling=4)
    tower = R.extend(_ypoly(RING.neg(X), RING.zero, ONE), "y")
    with pytest.raises(DimensionCeilingExceeded):
        tw.charpoly_of_multiplication(tower.variable(2), tower, ceiling=5)


def test_with_modulus_projects_higher_levels():
    g = _ypoly(ONE, _elem(0, -1, -1), ONE)
    tower = R.extend(g, "y")
    component = tower.with_modulus(1, (12, 1))
    # At x = 1 the quadratic collapses to (y - 1)^2.
    assert component.moduli[1] == ((1,), (11,), (1,))
    elem = tower.top.from_poly([X, ONE])
    assert tower.project(elem, 2, component, 1) == ((1,), (1,))
