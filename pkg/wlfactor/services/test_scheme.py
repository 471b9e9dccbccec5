import numpy as np
import pytest
from pydantic import ValidationError

from wlfactor.schemas.scheme import SchemeDump
from wlfactor.services import scheme as sc
from wlfactor.services.balance import augment_with_identity, stronger_balance
from wlfactor.services.errors import AxiomViolation, MalformedInput, NotTransitive, TrivialClosedSubset
from wlfactor.services.ffield import make_field_ctx
from wlfactor.services.fppoly import FpPoly, brute_force_roots, from_roots
from wlfactor.services.wl2 import ExplicitColoring, materialize_colors, sanity_checks, wl2_implicit


def _fixture(spec):
    return sc.schurian_fixture(sc.fixture_generators(spec))


def _matrix(n, pairs):
    matrix = np.zeros((n, n), dtype=np.int64)
    for i, j in pairs:
        matrix[i, j] = 1
    return matrix


def test_cyclic_three_is_thin_scheme():
    sch = sc.verify_scheme(_fixture("cyclic:3"))
    assert sch.is_thin()
    assert sch.identity_id == 0
    assert sch.transpose == {0: 0, 1: 2, 2: 1}
    assert sch.intersection[(1, 2, 0)] == 1
    assert sch.intersection[(1, 1, 2)] == 1
    assert sch.tensor_consistent()


def test_pentagon_distance_scheme():
    sch = sc.verify_scheme(_fixture("dihedral:5"))
    assert len(sch.color_ids) == 3
    assert sch.valency == {0: 1, 1: 2, 2: 2}
    assert sch.intersection[(1, 1, 2)] == 1
    assert sch.intersection[(1, 1, 0)] == 2
    assert sch.tensor_consistent()


def test_non_regular_graph_violates_intersection_axiom():
    path = _matrix(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
    rest = _matrix(3, [(0, 2), (2, 0)])
    with pytest.raises(AxiomViolation) as excinfo:
        sc.verify_scheme(ExplicitColoring(3, [np.eye(3, dtype=np.int64), path, rest]))
    assert excinfo.value.which == "intersection"
    assert excinfo.value.witness == (1, 1, 0)


def test_partition_identity_and_transpose_violations():
    eye = np.eye(3, dtype=np.int64)
    with pytest.raises(AxiomViolation) as excinfo:
        sc.verify_scheme(ExplicitColoring(3, [eye, _matrix(3, [(0, 1), (1, 2), (2, 0)])]))
    assert excinfo.value.which == "partition"

    loop_and_edge = _matrix(3, [(0, 0), (0, 1)])
    others = np.ones((3, 3), dtype=np.int64) - loop_and_edge
    with pytest.raises(AxiomViolation) as excinfo:
        sc.verify_scheme(ExplicitColoring(3, [loop_and_edge, others]))
    assert excinfo.value.which == "identity"

    skew = _matrix(3, [(0, 1), (1, 2), (2, 0), (1, 0)])
    with pytest.raises(AxiomViolation) as excinfo:
        sc.verify_scheme(ExplicitColoring(3, [eye, skew, _matrix(3, [(0, 2), (2, 1)])]))
    assert excinfo.value.which == "transpose"
    assert excinfo.value.witness == (1,)


def test_generated_closed_subsets():
    z3 = sc.verify_scheme(_fixture("cyclic:3"))
    assert sc.generated_closed_subset([1], z3).members == {0, 1, 2}
    assert sc.generated_closed_subset([0], z3) == sc.ClosedSubset(frozenset({0}), 1)
    pentagon = sc.verify_scheme(_fixture("dihedral:5"))
    assert sc.generated_closed_subset([1], pentagon).members == {0, 1, 2}
    with pytest.raises(MalformedInput):
        sc.generated_closed_subset([], pentagon)


def test_primitivity_verdicts():
    assert sc.is_primitive(sc.verify_scheme(_fixture("cyclic:3"))).primitive
    assert sc.is_primitive(sc.verify_scheme(_fixture("dihedral:5"))).primitive
    verdict = sc.is_primitive(sc.verify_scheme(_fixture("cyclic:4")))
    assert not verdict.primitive
    assert verdict.witness == sc.ClosedSubset(frozenset({0, 2}), 2)


def test_prime_point_counts_are_primitive():
    for spec in ("cyclic:5", "cyclic:7", "dihedral:7", "symmetric:5"):
        assert sc.is_primitive(sc.verify_scheme(_fixture(spec))).primitive


def test_quotient_partition_of_hexagon():
    sch = sc.verify_scheme(_fixture("cyclic:6"))
    closed = sc.generated_closed_subset([3], sch)
    assert closed.n_r == 2
    assert sc.quotient_partition(sch, closed) == [frozenset({0, 3}), frozenset({1, 4}), frozenset({2, 5})]
    assert {tuple(d.sorted_members()) for d in sc.closed_subsets_by_generator(sch).values()} == {
        (0, 1, 2, 3, 4, 5),
        (0, 2, 4),
        (0, 3),
    }


def test_schurian_fixtures():
    assert len(_fixture("symmetric:4").colors) == 2
    assert len(_fixture("dihedral:5").colors) == 3
    assert len(_fixture("cyclic:3").colors) == 3
    for spec in ("cyclic:8", "dihedral:6", "dihedral:8", "symmetric:3"):
        sc.verify_scheme(_fixture(spec))


def test_schurian_fixture_rejects_bad_generators():
    with pytest.raises(NotTransitive):
        sc.schurian_fixture([[1, 0, 2, 3]])
    with pytest.raises(MalformedInput):
        sc.schurian_fixture([[0, 0, 1]])
    with pytest.raises(MalformedInput):
        sc.fixture_generators("hexagonal:3")
    with pytest.raises(MalformedInput):
        sc.fixture_generators("cyclic:x")


def test_scheme_from_stable_matches_explicit_scheme():
    ctx = make_field_ctx(13)
    state = augment_with_identity(stronger_balance(FpPoly.of(ctx, [-1, 0, 0, 1])))
    stable = wl2_implicit(state)
    implicit = sc.scheme_from_stable(stable)
    explicit = sc.verify_scheme(materialize_colors(stable, [1, 3, 9]))
    assert implicit.intersection == explicit.intersection
    assert implicit.valency == explicit.valency
    assert implicit.tensor_consistent()
    assert sc.is_primitive(implicit).primitive


def _nine_point_state():
    ctx = make_field_ctx(101)
    roots = list(range(1, 10))
    f = from_roots(roots, ctx)
    return f, roots, sc.stable_state_from_explicit(f, roots, _fixture("cyclic:9"))


def test_stable_state_from_explicit_interpolates_colors():
    f, roots, state = _nine_point_state()
    ring = state.tower.top
    assert state.identity.poly == (ring.zero, ring.one)
    assert materialize_colors(state, roots).partition() == _fixture("cyclic:9").partition()
    assert state.product(1, 8) == ((0, 1),)
    assert sanity_checks(state) is not None


def test_primitive_reduction_on_nine_points():
    f, roots, state = _nine_point_state()
    verdict = sc.is_primitive(sc.scheme_from_stable(state))
    assert verdict.witness == sc.ClosedSubset(frozenset({0, 3, 6}), 3)

    result = sc.primitive_reduction(f, state, verdict.witness)
    assert result.n_d == 3
    assert 2 <= result.g.degree <= f.degree // result.n_d
    blocks = {result.lift_root(beta) for beta in brute_force_roots(result.g)}
    assert blocks == {from_roots(block, f.ctx) for block in ([1, 4, 7], [2, 5, 8], [3, 6, 9])}
    beta = brute_force_roots(result.g)[0]
    assert result.lift(FpPoly.of(f.ctx, [-beta, 1])) == result.lift_root(beta)


def test_primitive_reduction_rejects_trivial_subsets():
    f, _, state = _nine_point_state()
    with pytest.raises(TrivialClosedSubset):
        sc.primitive_reduction(f, state, sc.ClosedSubset(frozenset({0}), 1))
    with pytest.raises(TrivialClosedSubset):
        sc.primitive_reduction(f, state, sc.ClosedSubset(frozenset(range(9)), 9))


def test_scheme_dump_restores_coloring():
    sch = sc.verify_scheme(_fixture("dihedral:5"))
    dump = sc.scheme_to_dump(sch, sc.is_primitive(sch), sc.closed_subsets_by_generator(sch).values())
    assert dump.primitive is True
    assert dump.closed_subsets == [[0, 1, 2]]
    restored = SchemeDump.model_validate_json(dump.model_dump_json())
    assert sc.verify_scheme(sc.coloring_from_dump(restored)) == sch
    with pytest.raises(ValidationError):
        SchemeDump(n=1, colors=[[2]])
