import random

import numpy as np
import pytest

from wlfactor.schemas.colors import ColorSetDump
from wlfactor.services import wl2
from wlfactor.services.balance import ColorSet, augment_with_identity, stronger_balance, sylow_root_filter
from wlfactor.services.errors import DimensionCeilingExceeded, InternalInvariantBroken, MalformedInput
from wlfactor.services.ffield import make_field_ctx
from wlfactor.services.fppoly import FpPoly, from_roots
from wlfactor.services.tower import Factor


CTX13 = make_field_ctx(13)
CUBE = FpPoly.of(CTX13, [-1, 0, 0, 1])
CTX11 = make_field_ctx(11)
QUINTIC = FpPoly.of(CTX11, [-1, 0, 0, 0, 0, 1])


def _cube_state():
    return augment_with_identity(stronger_balance(CUBE))


def _cycle(n, steps):
    matrix = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for step in steps:
            matrix[i, (i + step) % n] = 1
    return matrix


def _coloring(*matrices):
    return wl2.ExplicitColoring(matrices[0].shape[0], [np.asarray(m, dtype=np.int64) for m in matrices])


def test_wl2_explicit_directed_triangle_is_stable():
    n = 3
    initial = _coloring(np.eye(n, dtype=np.int64), _cycle(n, [1]), _cycle(n, [2]))
    stable = wl2.wl2_explicit(initial)
    assert len(stable.colors) == 3
    assert stable.partition() == initial.partition()


def test_wl2_explicit_pentagon_and_complete_graph():
    pentagon = _coloring(np.eye(5, dtype=np.int64), _cycle(5, [1, 4]), _cycle(5, [2, 3]))
    assert wl2.wl2_explicit(pentagon).partition() == pentagon.partition()
    complete = _coloring(np.eye(4, dtype=np.int64), np.ones((4, 4), dtype=np.int64) - np.eye(4, dtype=np.int64))
    assert len(wl2.wl2_explicit(complete).colors) == 2


def test_wl2_explicit_refines_hexagon_distances():
    hexagon = _coloring(np.eye(6, dtype=np.int64), _cycle(6, [1, 5]), _cycle(6, [2, 3, 4]))
    stable = wl2.wl2_explicit(hexagon)
    assert len(stable.colors) == 4
    assert frozenset((i, (i + 3) % 6) for i in range(6)) in stable.partition()
    assert stable.labels()[0, 0] == 0


def test_wl2_explicit_rejects_malformed_colorings():
    eye = np.eye(3, dtype=np.int64)
    with pytest.raises(MalformedInput):
        wl2.wl2_explicit(_coloring(eye, _cycle(3, [1])))
    with pytest.raises(MalformedInput):
        wl2.wl2_explicit(_coloring(eye + _cycle(3, [1]), _cycle(3, [2])))
    with pytest.raises(MalformedInput):
        wl2.wl2_explicit(_coloring(eye, np.ones((3, 3), dtype=np.int64) - eye, np.zeros((3, 3), dtype=np.int64)))


def test_color_products_on_cube_roots_of_unity():
    state = _cube_state()
    ring = state.tower.top
    identity, a, a_t = state[0], state[1], state[2]

    forward_back = wl2.color_product(a, a_t, state)
    assert forward_back.poly == (ring.zero, ring.one)
    assert forward_back.parts == (((ring.zero, ring.one), 1),)

    assert wl2.color_product(a, a, state).poly == a_t.poly
    assert wl2.color_product(identity, a, state).poly == a.poly
    assert wl2.color_product(a_t, identity, state).poly == a_t.poly


def test_color_product_respects_dimension_ceiling():
    state = _cube_state()
    with pytest.raises(DimensionCeilingExceeded):
        wl2.color_product(state[1], state[2], state, ceiling=2)


def test_wl2_implicit_cube_is_thin_and_stable():
    stable = wl2.wl2_implicit(_cube_state())
    assert isinstance(stable, wl2.StableColorSet)
    assert len(stable) == 3
    assert stable.rounds == 1
    assert stable.product(1, 2) == ((0, 1),)
    assert stable.product(1, 1) == ((2, 1),)
    assert stable.product(0, 2) == ((2, 1),)
    certificate = wl2.sanity_checks(stable)
    assert isinstance(certificate, wl2.ThinSchemeCertificate)
    assert certificate.n == 3


def test_wl2_implicit_matches_explicit_on_cube():
    roots = [1, 3, 9]
    state = _cube_state()
    stable = wl2.wl2_implicit(state)
    explicit = wl2.wl2_explicit(wl2.materialize_colors(state, roots))
    assert wl2.materialize_colors(stable, roots).partition() == explicit.partition()


def test_wl2_implicit_refines_fifth_roots_of_unity_mod_11():
    roots = [1, 3, 4, 5, 9]
    state = augment_with_identity(stronger_balance(QUINTIC))
    assert len(state) == 3
    stable = wl2.wl2_implicit(state)
    assert isinstance(stable, wl2.StableColorSet)
    assert stable.rounds >= 2
    assert len(stable) == 5
    assert all(c.degree == 1 for c in stable.colors)
    assert all(c.signature is None for c in stable.non_identity())
    explicit = wl2.wl2_explicit(wl2.materialize_colors(state, roots))
    assert wl2.materialize_colors(stable, roots).partition() == explicit.partition()
    assert isinstance(wl2.sanity_checks(stable), wl2.ThinSchemeCertificate)


def test_wl2_implicit_matches_explicit_on_random_instances():
    rng = random.Random(41)
    for p in (13, 17, 29, 37, 41):
        ctx = make_field_ctx(p)
        for _ in range(10):
            roots = sorted(rng.sample(range(1, p), rng.choice((3, 5))))
            f = from_roots(roots, ctx)
            if isinstance(sylow_root_filter(f), Factor):
                continue
            balanced = stronger_balance(f)
            if isinstance(balanced, Factor):
                continue
            state = augment_with_identity(balanced)
            stable = wl2.wl2_implicit(state)
            if isinstance(stable, Factor):
                assert stable.factor.divides(f)
                continue
            wl2.sanity_checks(stable)
            explicit = wl2.wl2_explicit(wl2.materialize_colors(state, roots))
            assert wl2.materialize_colors(stable, roots).partition() == explicit.partition()
            assert stable.rounds <= len(roots)


def test_sanity_checks_reject_missing_identity():
    stable = wl2.wl2_implicit(_cube_state())
    broken = wl2.StableColorSet(
        f=stable.f,
        tower=stable.tower,
        colors=tuple(stable.non_identity()),
        identity_id=None,
        product_table=stable.product_table,
    )
    with pytest.raises(InternalInvariantBroken):
        wl2.sanity_checks(broken)


def test_materialized_initial_colors_are_the_directed_triangle():
    coloring = wl2.materialize_colors(_cube_state(), [1, 3, 9])
    wl2.validate_well_behaved(coloring)
    identity, a, a_t = coloring.colors
    assert (identity == np.eye(3, dtype=np.int64)).all()
    assert (a @ a == a_t).all()
    assert (a.T == a_t).all()


def test_dump_and_load_stable_color_set():
    stable = wl2.wl2_implicit(_cube_state())
    dump = wl2.dump_color_set(stable)
    restored = wl2.load_color_set(ColorSetDump.model_validate_json(dump.model_dump_json()))
    assert isinstance(restored, wl2.StableColorSet)
    assert restored.colors == stable.colors
    assert restored.product_table == stable.product_table
    assert dump.colors[1].signature == [1, 0]


def test_load_rejects_dangling_transpose():
    dump = wl2.dump_color_set(_cube_state())
    dump.colors[1].transpose_id = 99
    with pytest.raises(MalformedInput):
        wl2.load_color_set(dump)
    assert isinstance(wl2.load_color_set(wl2.dump_color_set(_cube_state())), ColorSet)
