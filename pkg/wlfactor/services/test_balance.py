import random

import pytest

from wlfactor.services import balance as bal
from wlfactor.services import ffield as ff
from wlfactor.services.errors import InternalInvariantBroken
from wlfactor.services.fppoly import FpPoly, brute_force_roots, from_roots
from wlfactor.services.tower import Factor, base_tower, evaluate_at_root


CTX13 = ff.make_field_ctx(13)
CUBE = FpPoly.of(CTX13, [-1, 0, 0, 1])
PAIR = FpPoly.of(CTX13, [2, -3, 1])


def _specialise(poly, tower, root):
    return FpPoly.of(tower.ctx, [evaluate_at_root(c, tower, [root]) for c in poly])


def test_build_g_for_two_roots():
    tower = base_tower(PAIR)
    g = bal.build_g(PAIR, tower)
    assert g == ((3, 11), (1, 0))
    assert brute_force_roots(_specialise(g, tower, 1)) == [12]
    assert brute_force_roots(_specialise(g, tower, 2)) == [1]


def test_build_g_roots_are_root_differences():
    tower = base_tower(CUBE)
    g = bal.build_g(CUBE, tower)
    assert len(g) == 3 and g[-1] == tower.top.one
    assert brute_force_roots(_specialise(g, tower, 1)) == [5, 11]
    # y does not divide g: its constant term is a unit of R.
    assert tower.top.mul(g[0], tower.top.invert(g[0])) == tower.top.one


def test_zero_root_factor():
    assert bal.zero_root_factor(FpPoly.of(CTX13, [0, -1, 1])) == Factor(FpPoly.x(CTX13), "zero_root")
    assert bal.zero_root_factor(FpPoly.x(CTX13)) is None
    assert bal.zero_root_factor(CUBE) is None
    with pytest.raises(InternalInvariantBroken):
        bal.sylow_root_filter(FpPoly.of(CTX13, [0, -1, 1]))


def test_sylow_root_filter_cases():
    result = bal.sylow_root_filter(PAIR)
    assert isinstance(result, Factor)
    assert result.factor == FpPoly.of(CTX13, [-1, 1])
    assert bal.sylow_root_filter(CUBE) == bal.AllRootsShareSignature(ff.SylowSignature((0, 0)))
    assert isinstance(bal.sylow_root_filter(FpPoly.of(CTX13, [-5, 1])), bal.AllRootsShareSignature)


def test_sylow_root_filter_matches_oracle_signatures():
    rng = random.Random(29)
    for p in (13, 17, 29, 41):
        ctx = ff.make_field_ctx(p)
        for _ in range(15):
            roots = rng.sample(range(1, p), rng.randrange(2, 6))
            result = bal.sylow_root_filter(from_roots(roots, ctx))
            signatures = {ff.sylow_signature(a, ctx) for a in roots}
            if len(signatures) > 1:
                assert isinstance(result, Factor)
                assert 1 <= result.factor.degree < len(roots)
            else:
                assert result == bal.AllRootsShareSignature(signatures.pop())


def test_stronger_balance_on_cube_roots_of_unity():
    state = bal.stronger_balance(CUBE)
    assert isinstance(state, bal.ColorSet)
    assert [c.signature.value for c in state.colors] == [1, 3]
    assert [c.degree for c in state.colors] == [1, 1]
    first, second = state.colors
    assert first.transpose_id == second.id and second.transpose_id == first.id

    roots = [1, 3, 9]
    for color in state.colors:
        for xi in roots:
            members = bal.color_roots_at(color, state.tower, xi, roots)
            assert len(members) == color.degree
            assert all(ff.sylow_signature(xi - xj, CTX13) == color.signature for xj in members)


def test_stronger_balance_factors_unbalanced_pair():
    result = bal.stronger_balance(PAIR)
    assert isinstance(result, Factor)
    assert result.factor.divides(PAIR)
    assert 1 <= result.factor.degree < PAIR.degree


def test_single_branching_bit_gives_two_colors():
    ctx = ff.make_field_ctx(7)
    state = bal.stronger_balance(FpPoly.of(ctx, [-1, 0, 0, 1]))
    assert [c.signature.value for c in state.colors] == [0, 1]
    assert state.colors[0].transpose_id == state.colors[1].id


def test_augment_with_identity():
    state = bal.augment_with_identity(bal.stronger_balance(CUBE))
    assert state.identity_id == bal.IDENTITY_ID
    assert state.identity.poly == (state.tower.top.zero, state.tower.top.one)
    assert state.identity.is_symmetric
    assert len(state) == 3


def _balance_sweep(seed, sizes):
    rng = random.Random(seed)
    for p in (13, 17, 29, 37, 41, 53):
        ctx = ff.make_field_ctx(p)
        for _ in range(12):
            roots = rng.sample(range(1, p), rng.choice(sizes))
            if len({ff.sylow_signature(a, ctx) for a in roots}) > 1:
                continue
            yield ctx, roots, bal.stronger_balance(from_roots(roots, ctx))


def test_unbalanced_instances_always_factor():
    for ctx, roots, result in _balance_sweep(31, (3, 4, 5)):
        if not ff.is_stronger_balanced(roots, ctx) or not ff.is_square_balanced(roots, ctx):
            assert isinstance(result, Factor)
        if isinstance(result, bal.ColorSet):
            assert sum(c.degree for c in result.colors) == len(roots) - 1
            assert len(result.colors) >= 2


def test_even_degree_always_factors_in_balance():
    for _, roots, result in _balance_sweep(37, (2, 4, 6)):
        assert isinstance(result, Factor)
        assert result.factor.degree < len(roots)
