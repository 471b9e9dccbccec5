import pytest

from wlfactor.services import ffield as ff
from wlfactor.services.errors import FieldTooLarge, NonResidueScanExhausted, NotPrime, ZeroInput


def test_make_field_ctx_known_primes():
    assert ff.make_field_ctx(13) == ff.FieldCtx(p=13, r=2, w=3, gamma=2, eta=8)
    assert ff.make_field_ctx(5) == ff.FieldCtx(p=5, r=2, w=1, gamma=2, eta=2)
    assert ff.make_field_ctx(7) == ff.FieldCtx(p=7, r=1, w=3, gamma=3, eta=6)


def test_make_field_ctx_rejects_non_primes():
    for bad in (1, 2, 4, 9, 15, 91):
        with pytest.raises(NotPrime):
            ff.make_field_ctx(bad)


def test_make_field_ctx_rejects_wide_modulus():
    with pytest.raises(FieldTooLarge):
        ff.make_field_ctx((1 << 62) + 1)


def test_make_field_ctx_scan_bound_and_fallback():
    # 23 has least non-residue 5; a scan constant of 0 leaves an empty window.
    with pytest.raises(NonResidueScanExhausted):
        ff.make_field_ctx(23, scan_constant=0)
    assert ff.make_field_ctx(23, scan_constant=0, allow_full_scan=True).gamma == 5


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 41, 97, 257, 7681, 9973])
def test_field_ctx_invariants(p):
    ctx = ff.make_field_ctx(p)
    assert (1 << ctx.r) * ctx.w == p - 1
    assert ctx.w % 2 == 1
    assert pow(ctx.gamma, (p - 1) // 2, p) == p - 1
    assert all(ff.is_quadratic_residue(b, p) for b in range(1, ctx.gamma))
    assert pow(ctx.eta, 1 << (ctx.r - 1), p) == p - 1
    assert pow(ctx.eta, 1 << ctx.r, p) == 1


def test_sylow_signature_cases_mod_13():
    ctx = ff.make_field_ctx(13)
    assert ff.sylow_signature(1, ctx).bits == (0, 0)
    assert ff.sylow_signature(11, ctx).value == 3
    assert ff.sylow_signature(2, ctx).bits == (1, 0)
    assert ff.sylow_signature(5, ctx).value == 1
    assert ff.sylow_signature(12, ctx).value == 2


def test_sylow_signature_rejects_zero():
    ctx = ff.make_field_ctx(13)
    with pytest.raises(ZeroInput):
        ff.sylow_signature(26, ctx)


@pytest.mark.parametrize("p", [5, 7, 13, 17, 41, 97, 257])
def test_sylow_signature_reconstructs_and_flips_under_negation(p):
    ctx = ff.make_field_ctx(p)
    for a in range(1, p):
        sig = ff.sylow_signature(a, ctx)
        assert len(sig.bits) == ctx.r
        assert pow(ctx.eta, sig.value, p) == pow(a, ctx.w, p)
        assert ff.negation_flips_top_bit(a, ctx)
        assert ff.sylow_signature(-a, ctx) == sig.flip_top()


def test_signature_value_round_trip_and_bounds():
    sig = ff.SylowSignature.from_value(5, 3)
    assert sig.bits == (1, 0, 1)
    assert sig.value == 5
    assert sig.flip_top().value == 1
    with pytest.raises(ValueError):
        ff.SylowSignature.from_value(8, 3)


def test_balance_sets_for_cube_roots_of_unity_mod_13():
    ctx = ff.make_field_ctx(13)
    roots = [1, 3, 9]
    assert ff.balance_profile(roots, ctx) == [(0, 1), (0, 1), (0, 1)]
    assert ff.is_stronger_balanced(roots, ctx)
    assert ff.is_square_balanced(roots, ctx)
    # 1 - 9 = 5 is a square (u = 1), 1 - 3 = 11 is not (u = 3).
    assert ff.gao_square_balance_sets(roots, ctx)[0] == frozenset({9})


def test_unbalanced_pair_mod_13():
    ctx = ff.make_field_ctx(13)
    assert ff.balance_profile([1, 2], ctx) == [(1, 0), (1, 1)]
    assert not ff.is_stronger_balanced([1, 2], ctx)
    assert not ff.is_square_balanced([1, 2], ctx)


def test_prime_field_ring_protocol():
    field = ff.PrimeField(ff.make_field_ctx(13))
    assert field.add(12, 5) == 4
    assert field.sub(1, 3) == 11
    assert field.neg(1) == 12
    assert field.mul(2, 7) == 1
    assert field.invert(2) == 7
    assert field.from_int(-1) == 12
    assert field.is_zero(field.zero)
    with pytest.raises(ZeroInput):
        field.invert(0)
