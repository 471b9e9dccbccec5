"""Association schemes: axioms, closed subsets, primitivity and reduction.

A scheme is stored by color id with its sparse intersection tensor
a[(p, q, r)], the number of z with (x, z) in p and (z, y) in q for any
(x, y) in r. Explicit schemes also keep their 0/1 matrices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from wlfactor.schemas.scheme import IntersectionTriple, SchemeDump
from wlfactor.services import ringpoly as rp
from wlfactor.services.balance import ColorPoly
from wlfactor.services.errors import (
    AxiomViolation,
    InternalInvariantBroken,
    MalformedInput,
    NoDistinguishingCoefficient,
    NotTransitive,
    TrivialClosedSubset,
)
from wlfactor.services.fppoly import (
    FpPoly,
    from_roots,
    interpolate,
    lift_factor,
    poly_gcd,
    resultant_via_charpoly,
    squarefree_decompose,
)
from wlfactor.services.tower import base_tower
from wlfactor.services.wl2 import ExplicitColoring, StableColorSet


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scheme:
    n: int
    color_ids: tuple[int, ...]
    identity_id: int
    transpose: dict[int, int]
    valency: dict[int, int]
    intersection: dict[tuple[int, int, int], int]
    matrices: tuple[np.ndarray, ...] | None = field(default=None, compare=False, repr=False)

    def product_support(self, p: int, q: int) -> set[int]:
        return {r for r in self.color_ids if self.intersection.get((p, q, r), 0) > 0}

    def is_thin(self) -> bool:
        return len(self.color_ids) == self.n

    def tensor_consistent(self) -> bool:
        """sum_r a_pqr * k_r == k_p * k_q for every ordered pair of colors."""
        for p in self.color_ids:
            for q in self.color_ids:
                total = sum(self.intersection.get((p, q, r), 0) * self.valency[r] for r in self.color_ids)
                if total != self.valency[p] * self.valency[q]:
                    return False
        return True


@dataclass(frozen=True)
class ClosedSubset:
    members: frozenset[int]
    n_r: int

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


@dataclass(frozen=True)
class PrimitivityVerdict:
    primitive: bool
    witness: ClosedSubset | None = None


def verify_scheme(coloring: ExplicitColoring) -> Scheme:
    """Check the four scheme axioms on explicit colors and build the intersection tensor."""
    n = coloring.n
    matrices = [np.asarray(c, dtype=np.int64) for c in coloring.colors]
    if not matrices:
        raise MalformedInput("A scheme needs at least one color.")
    for index, color in enumerate(matrices):
        if color.shape != (n, n):
            raise MalformedInput(f"Color {index} has shape {color.shape}, expected {(n, n)}.")
        if not np.isin(color, (0, 1)).all():
            raise MalformedInput(f"Color {index} is not a 0/1 matrix.")
        if not color.any():
            raise AxiomViolation("partition", (index,), "empty color")

    total = np.sum(matrices, axis=0)
    bad = np.argwhere(total != 1)
    if len(bad):
        i, j = (int(v) for v in bad[0])
        raise AxiomViolation("partition", (i, j), f"pair covered {int(total[i, j])} times")

    identity_id = next(k for k, color in enumerate(matrices) if color[0, 0])
    mismatch = np.argwhere(matrices[identity_id] != np.eye(n, dtype=np.int64))
    if len(mismatch):
        i, j = (int(v) for v in mismatch[0])
        raise AxiomViolation("identity", (i, j))

    keys = {color.tobytes(): k for k, color in enumerate(matrices)}
    transpose = {}
    for k, color in enumerate(matrices):
        partner = keys.get(np.ascontiguousarray(color.T).tobytes())
        if partner is None:
            raise AxiomViolation("transpose", (k,))
        transpose[k] = partner

    intersection: dict[tuple[int, int, int], int] = {}
    for p, left in enumerate(matrices):
        for q, right in enumerate(matrices):
            walks = left @ right
            for r, target in enumerate(matrices):
                values = walks[target == 1]
                if values.min() != values.max():
                    raise AxiomViolation("intersection", (p, q, r), f"counts range {values.min()}..{values.max()}")
                if values[0]:
                    intersection[(p, q, r)] = int(values[0])

    ids = tuple(range(len(matrices)))
    valency = {k: int(matrices[k][0].sum()) for k in ids}
    logger.debug("Verified scheme on %s points with %s colors.", n, len(ids))
    return Scheme(
        n=n,
        color_ids=ids,
        identity_id=identity_id,
        transpose=transpose,
        valency=valency,
        intersection=intersection,
        matrices=tuple(matrices),
    )


def scheme_from_stable(state: StableColorSet) -> Scheme:
    """Scheme read off the product table: a_lts is the recorded multiplicity of s in l*t."""
    if state.identity_id is None:
        raise InternalInvariantBroken("A stable color set without identity is not a scheme.")
    intersection = {}
    for (left, right), terms in state.product_table.items():
        for color_id, multiplicity in terms:
            intersection[(left, right, color_id)] = multiplicity
    return Scheme(
        n=state.n,
        color_ids=tuple(state.ids()),
        identity_id=state.identity_id,
        transpose={c.id: c.transpose_id for c in state.colors},
        valency={c.id: c.degree for c in state.colors},
        intersection=intersection,
    )


def generated_closed_subset(generators: Iterable[int], sch: Scheme) -> ClosedSubset:
    members = set(generators)
    if not members:
        raise MalformedInput("A closed subset needs at least one generator.")
    members |= {sch.transpose[c] for c in members}
    for _ in range(len(sch.color_ids)):
        grown = set(members)
        for p in members:
            for q in members:
                grown |= sch.product_support(p, q)
        if grown == members:
            break
        members = grown
    n_r = sum(sch.valency[c] for c in members)
    if sch.n % n_r:
        raise InternalInvariantBroken(f"Closed subset of valency {n_r} does not divide n = {sch.n}.")
    return ClosedSubset(frozenset(members), n_r)


def closed_subsets_by_generator(sch: Scheme) -> dict[int, ClosedSubset]:
    return {
        c: generated_closed_subset([c], sch)
        for c in sch.color_ids
        if c != sch.identity_id
    }


def is_primitive(sch: Scheme) -> PrimitivityVerdict:
    """Primitive iff every non-identity color generates the whole scheme."""
    everything = frozenset(sch.color_ids)
    proper = [d for d in closed_subsets_by_generator(sch).values() if d.members != everything]
    if not proper:
        return PrimitivityVerdict(primitive=True)
    witness = min(proper, key=lambda d: (d.n_r, d.sorted_members()))
    logger.info("Scheme is imprimitive: closed subset %s of valency %s.", witness.sorted_members(), witness.n_r)
    return PrimitivityVerdict(primitive=False, witness=witness)


def quotient_partition(sch: Scheme, closed: ClosedSubset) -> list[frozenset[int]]:
    """X/R: the classes {y : r(x, y) in R}, which partition the points."""
    if sch.matrices is None:
        raise MalformedInput("The quotient partition needs explicit colors.")
    relation = np.sum([sch.matrices[c] for c in closed.sorted_members()], axis=0)
    classes: list[frozenset[int]] = []
    seen: set[int] = set()
    for x in range(sch.n):
        if x in seen:
            continue
        block = frozenset(int(y) for y in np.flatnonzero(relation[x]))
        if seen & block or len(block) != closed.n_r:
            raise InternalInvariantBroken(f"Closed subset {closed.sorted_members()} does not partition the points.")
        seen |= block
        classes.append(block)
    return classes


@dataclass(frozen=True)
class ReductionResult:
    f: FpPoly
    g: FpPoly
    h: FpPoly
    closed: ClosedSubset
    n_d: int

    def lift_root(self, beta: int) -> FpPoly:
        """gcd(h - beta, f): the roots of f lying in one block of the closed subset."""
        return poly_gcd(self.h - FpPoly.constant(self.f.ctx, beta), self.f)

    def lift(self, factor: FpPoly) -> FpPoly:
        return lift_factor(factor, self.h, self.f)


def primitive_reduction(f: FpPoly, state: StableColorSet, closed: ClosedSubset) -> ReductionResult:
    """Reduce f to a polynomial of degree at most n / n_D whose roots index the blocks of D."""
    if closed.members == {state.identity_id} or closed.members == set(state.ids()):
        raise TrivialClosedSubset(f"Closed subset {closed.sorted_members()} is trivial.")
    tower = state.tower
    ring = tower.top
    g_d: tuple = rp.constant(ring, ring.one)
    for color_id in closed.sorted_members():
        g_d = rp.mul(ring, g_d, state[color_id].poly)
    n_d = rp.degree(g_d)
    if n_d != closed.n_r:
        raise InternalInvariantBroken(f"deg g_D = {n_d} but the closed subset has valency {closed.n_r}.")

    # B_D(y) = (-1)^n_D g_D(X - y): the monic polynomial of the block of each root.
    block = rp.compose(ring, g_d, (tower.variable(1), ring.from_int(-1)))
    if n_d % 2:
        block = rp.neg(ring, block)
    for k in range(n_d - 1, -1, -1):
        h = FpPoly.of(f.ctx, block[k])
        if h.degree >= 1:
            break
    else:
        raise NoDistinguishingCoefficient(f"Every block coefficient of {closed.sorted_members()} is a scalar.")

    charpoly = resultant_via_charpoly(h, f)
    g = FpPoly.constant(f.ctx, 1)
    for part, _ in squarefree_decompose(charpoly):
        g = g * part
    if g.degree * n_d > f.degree:
        raise InternalInvariantBroken(f"Reduced degree {g.degree} exceeds n / n_D = {f.degree // n_d}.")
    logger.info("Primitive reduction: degree %s -> %s via a closed subset of valency %s.", f.degree, g.degree, n_d)
    return ReductionResult(f=f, g=g, h=h, closed=closed, n_d=n_d)


class UnionFind:
    def __init__(self, items: Iterable) -> None:
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in self.parent}

    def find(self, x):
        root = self.parent[x]
        if self.parent[root] != root:
            root = self.parent[x] = self.find(root)
        return root

    def union(self, x, y) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x

    def classes(self) -> list[list]:
        grouped: dict = {}
        for x in self.parent:
            grouped.setdefault(self.find(x), []).append(x)
        return sorted(sorted(members) for members in grouped.values())


def _check_permutations(generators: Sequence[Sequence[int]], m: int) -> list[tuple[int, ...]]:
    checked = []
    for index, gen in enumerate(generators):
        image = tuple(int(v) for v in gen)
        if sorted(image) != list(range(m)):
            raise MalformedInput(f"Generator {index} is not a permutation of {m} points.")
        checked.append(image)
    return checked


def schurian_fixture(generators: Sequence[Sequence[int]], m: int | None = None) -> ExplicitColoring:
    """2-orbits of a transitive permutation group, as an explicit coloring."""
    if m is None:
        if not generators:
            raise MalformedInput("Pass the point count when there are no generators.")
        m = len(generators[0])
    gens = _check_permutations(generators, m)

    points = UnionFind(range(m))
    for gen in gens:
        for x in range(m):
            points.union(x, gen[x])
    if len(points.classes()) != 1:
        raise NotTransitive(f"Generators have {len(points.classes())} orbits on {m} points.")

    pairs = UnionFind((i, j) for i in range(m) for j in range(m))
    for gen in gens:
        for i in range(m):
            for j in range(m):
                pairs.union((i, j), (gen[i], gen[j]))

    colors = []
    for orbit in pairs.classes():
        matrix = np.zeros((m, m), dtype=np.int64)
        rows, cols = zip(*orbit)
        matrix[list(rows), list(cols)] = 1
        colors.append(matrix)
    logger.debug("Fixture on %s points has %s 2-orbits.", m, len(colors))
    return ExplicitColoring(m, colors)


def fixture_generators(spec: str) -> list[list[int]]:
    """Generators for ``cyclic:m``, ``dihedral:m`` and ``symmetric:m``."""
    family, _, size = spec.partition(":")
    try:
        m = int(size)
    except ValueError as exc:
        raise MalformedInput(f"Fixture spec {spec!r} needs an integer point count.") from exc
    if m < 1:
        raise MalformedInput(f"Fixture spec {spec!r} needs at least one point.")
    shift = [(i + 1) % m for i in range(m)]
    if family == "cyclic":
        return [shift]
    if family == "dihedral":
        return [shift, [(-i) % m for i in range(m)]]
    if family == "symmetric":
        swap = list(range(m))
        if m >= 2:
            swap[0], swap[1] = 1, 0
        return [shift, swap]
    raise MalformedInput(f"Unknown fixture family {family!r}; use cyclic, dihedral or symmetric.")


def stable_state_from_explicit(f: FpPoly, roots: Sequence[int], coloring: ExplicitColoring) -> StableColorSet:
    """Color polynomials interpolated from an explicit scheme on the roots of f.

    Color k becomes prod over its row-i pairs of (y - (xi_i - xi_j)) at the
    idempotent of xi_i, with intersection numbers as the product table.
    """
    f = f.monic()
    ctx = f.ctx
    if from_roots(roots, ctx) != f:
        raise MalformedInput("The roots do not match f.")
    sch = verify_scheme(coloring)
    tower = base_tower(f)
    ring = tower.top
    colors = []
    for k, matrix in enumerate(sch.matrices):
        rows = [
            from_roots([(xi - roots[j]) % ctx.p for j in np.flatnonzero(matrix[i])], ctx)
            for i, xi in enumerate(roots)
        ]
        coeffs = []
        for power in range(sch.valency[k] + 1):
            values = [(xi, row.coeffs[power]) for xi, row in zip(roots, rows)]
            coeffs.append(ring.from_poly(interpolate(values, ctx).coeffs))
        colors.append(ColorPoly(id=k, poly=rp.trim(ring, coeffs), transpose_id=sch.transpose[k]))

    table: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}
    for p in sch.color_ids:
        for q in sch.color_ids:
            table[(p, q)] = tuple(
                (r, sch.intersection[(p, q, r)]) for r in sch.color_ids if (p, q, r) in sch.intersection
            )
    return StableColorSet(
        f=f,
        tower=tower,
        colors=tuple(colors),
        identity_id=sch.identity_id,
        product_table=table,
    )


def scheme_to_dump(
    sch: Scheme,
    verdict: PrimitivityVerdict | None = None,
    closed: Iterable[ClosedSubset] = (),
) -> SchemeDump:
    colors = [] if sch.matrices is None else [m.reshape(-1).tolist() for m in sch.matrices]
    return SchemeDump(
        n=sch.n,
        identity_id=sch.identity_id,
        colors=colors,
        transpose=[sch.transpose[c] for c in sch.color_ids],
        valencies=[sch.valency[c] for c in sch.color_ids],
        intersection=[
            IntersectionTriple(p=p, q=q, r=r, value=value) for (p, q, r), value in sorted(sch.intersection.items())
        ],
        primitive=None if verdict is None else verdict.primitive,
        closed_subsets=sorted({tuple(d.sorted_members()) for d in closed}),
    )


def coloring_from_dump(dump: SchemeDump) -> ExplicitColoring:
    n = dump.n
    if not dump.colors:
        raise MalformedInput("The scheme file carries no explicit colors.")
    matrices = []
    for index, flat in enumerate(dump.colors):
        if len(flat) != n * n:
            raise MalformedInput(f"Color {index} has {len(flat)} entries, expected {n * n}.")
        matrices.append(np.asarray(flat, dtype=np.int64).reshape(n, n))
    return ExplicitColoring(n, matrices)
