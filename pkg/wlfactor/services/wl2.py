"""2-dimensional Weisfeiler-Leman refinement, explicit and implicit.

The explicit engine refines 0/1 matrices over known points. The implicit
engine never sees the roots of f: a color is a monic g_l(y) in R[y] whose
y-roots at the idempotent of xi_i are the differences xi_i - xi_j over the
edges (i, j) of the color, and the product of two colors is read off a
characteristic polynomial over a tower built from f, g_l and g_t.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from wlfactor.schemas.colors import ColorDump, ColorSetDump, ProductEntry
from wlfactor.services import ringpoly as rp
from wlfactor.services.balance import ColorPoly, ColorSet, build_g, color_roots_at
from wlfactor.services.errors import InternalInvariantBroken, MalformedInput
from wlfactor.services.ffield import SylowSignature, make_field_ctx
from wlfactor.services.fppoly import FpPoly
from wlfactor.services.tower import (
    DEFAULT_DIMENSION_CEILING,
    Factor,
    FactorFound,
    TowerCtx,
    ZeroDivisorFound,
    base_tower,
    charpoly_of_multiplication,
    semisimple_gcd,
    witness_to_base_factor,
)


logger = logging.getLogger(__name__)

_NO_SIGNATURE = 1 << 62


@dataclass
class ExplicitColoring:
    n: int
    colors: list[np.ndarray]

    @classmethod
    def from_labels(cls, labels: np.ndarray) -> "ExplicitColoring":
        labels = np.asarray(labels, dtype=np.int64)
        count = int(labels.max()) + 1 if labels.size else 0
        return cls(labels.shape[0], [(labels == k).astype(np.int64) for k in range(count)])

    def labels(self) -> np.ndarray:
        labels = np.full((self.n, self.n), -1, dtype=np.int64)
        for index, color in enumerate(self.colors):
            labels[color == 1] = index
        return labels

    def partition(self) -> set[frozenset[tuple[int, int]]]:
        """Colors as sets of (i, j) pairs, independent of color order."""
        return {frozenset(map(tuple, np.argwhere(color).tolist())) for color in self.colors}


def validate_well_behaved(coloring: ExplicitColoring) -> None:
    n = coloring.n
    if not coloring.colors:
        raise MalformedInput("An explicit coloring needs at least one color.")
    total = np.zeros((n, n), dtype=np.int64)
    for index, color in enumerate(coloring.colors):
        if color.shape != (n, n):
            raise MalformedInput(f"Color {index} has shape {color.shape}, expected {(n, n)}.")
        if not np.isin(color, (0, 1)).all():
            raise MalformedInput(f"Color {index} is not a 0/1 matrix.")
        if not color.any():
            raise MalformedInput(f"Color {index} is empty.")
        diagonal = int(np.trace(color))
        if diagonal not in (0, int(color.sum())):
            raise MalformedInput(f"Color {index} mixes diagonal and off-diagonal pairs.")
        total += color
    if not (total == 1).all():
        raise MalformedInput("Colors must partition every ordered pair exactly once.")
    keys = {color.tobytes() for color in coloring.colors}
    for index, color in enumerate(coloring.colors):
        if np.ascontiguousarray(color.T).tobytes() not in keys:
            raise MalformedInput(f"Transpose of color {index} is not a color.")


def _first_occurrence_labels(keys: np.ndarray, n: int) -> tuple[np.ndarray, int]:
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[inverse].reshape(n, n), len(first)


def wl2_explicit(initial: ExplicitColoring) -> ExplicitColoring:
    """Stable 2-WL refinement; colors ordered by first occurrence in row-major order."""
    validate_well_behaved(initial)
    n = initial.n
    labels, count = _first_occurrence_labels(initial.labels().reshape(-1, 1), n)
    while True:
        matrices = [(labels == k).astype(np.int64) for k in range(count)]
        features = [labels.reshape(-1)]
        for left in matrices:
            for right in matrices:
                features.append((left @ right).reshape(-1))
        refined, refined_count = _first_occurrence_labels(np.stack(features, axis=1), n)
        logger.debug("Explicit WL: %s -> %s colors.", count, refined_count)
        if refined_count == count:
            return ExplicitColoring.from_labels(refined)
        labels, count = refined, refined_count


@dataclass(frozen=True)
class ColorProduct:
    left: int
    right: int
    poly: tuple
    support: tuple
    parts: tuple[tuple[tuple, int], ...]


@dataclass(frozen=True)
class StableColorSet(ColorSet):
    product_table: dict = field(default_factory=dict, compare=False)
    rounds: int = 0

    def product(self, left: int, right: int) -> tuple[tuple[int, int], ...]:
        return self.product_table[(left, right)]


@dataclass(frozen=True)
class ThinSchemeCertificate:
    state: StableColorSet

    @property
    def n(self) -> int:
        return self.state.n


def _raise_factor(exc: ZeroDivisorFound, tower: TowerCtx) -> None:
    found = witness_to_base_factor(exc.witness, tower)
    if isinstance(found, FpPoly):
        raise FactorFound(found) from exc
    raise exc


def _halting_yun(poly: tuple, tower: TowerCtx) -> list[tuple[tuple, int]]:
    try:
        return rp.yun(tower.top, poly)
    except ZeroDivisorFound as exc:
        _raise_factor(exc, tower)


def _product_polynomial(l: ColorPoly, t: ColorPoly, state: ColorSet, ceiling: int) -> tuple:
    """Characteristic polynomial of the l-then-t path sums, with multiplicities."""
    if l.id == state.identity_id:
        return t.poly
    if t.id == state.identity_id:
        return l.poly

    f = state.f
    tower = state.tower
    ring = tower.top
    g_l_bar = state.transpose_of(l).poly

    # T = R[Y]/(g_l^T(Y)); h(z) = g_t(z + Y).
    t_tower = tower.extend(g_l_bar, "Y", ceiling=ceiling)
    t_top = t_tower.top
    y_var = t_tower.variable(2)
    h = rp.compose(t_top, [t_tower.embed(c, 1) for c in t.poly], (y_var, t_top.one))

    # T' = R'[X]/(M), R' = F_p[y']/(f), M(X) = (-1)^d_l g_l(y' - X; y'); x -> X, Y -> X - y'.
    r_prime = base_tower(f, name="y'", ceiling=ceiling)
    rp_ring = r_prime.top
    shift = (r_prime.variable(1), rp_ring.from_int(-1))
    modulus = rp.compose(rp_ring, l.poly, shift)
    if l.degree % 2:
        modulus = rp.neg(rp_ring, modulus)
    t_prime = r_prime.extend(modulus, "X", ceiling=ceiling)
    tp_top = t_prime.top
    x_big = t_prime.variable(2)
    y_shift = tp_top.sub(x_big, t_prime.variable(1))

    def transport(elem: tuple) -> tuple:
        acc = tp_top.zero
        for r_coeff in reversed(elem):
            inner = tp_top.zero
            for c in reversed(r_coeff):
                inner = tp_top.add(tp_top.mul(inner, x_big), tp_top.from_int(c))
            acc = tp_top.add(tp_top.mul(acc, y_shift), inner)
        return acc

    h_prime = tuple(transport(c) for c in h)

    # U = T'[z]/(h'); the product is charpoly(Z) over R'.
    u_tower = t_prime.extend(h_prime, "z", ceiling=ceiling)
    product = charpoly_of_multiplication(u_tower.variable(3), u_tower, base_level=1, ceiling=ceiling)
    if rp.degree(product) != l.degree * t.degree or product[-1] != ring.one:
        raise InternalInvariantBroken(f"Product of colors {l.id} and {t.id} has the wrong shape.")
    return product


def _full_difference_poly(state: ColorSet) -> tuple:
    """y * g(y, x): every difference xi_i - xi_j including 0, once."""
    ring = state.tower.top
    return rp.mul(ring, (ring.zero, ring.one), build_g(state.f, state.tower))


def _compute_product(
    l: ColorPoly,
    t: ColorPoly,
    state: ColorSet,
    ceiling: int,
    full: tuple | None = None,
) -> ColorProduct:
    tower = state.tower
    ring = tower.top
    poly = _product_polynomial(l, t, state, ceiling)
    parts = tuple(_halting_yun(poly, tower))
    full = full if full is not None else _full_difference_poly(state)
    support = semisimple_gcd(poly, full, tower, halt=True).gcd
    radical: tuple = rp.constant(ring, ring.one)
    for part, _ in parts:
        radical = rp.mul(ring, radical, part)
    if radical != support:
        raise InternalInvariantBroken(f"Support of product ({l.id}, {t.id}) disagrees with its squarefree parts.")
    return ColorProduct(left=l.id, right=t.id, poly=poly, support=support, parts=parts)


def color_product(
    l: ColorPoly,
    t: ColorPoly,
    state: ColorSet,
    *,
    ceiling: int = DEFAULT_DIMENSION_CEILING,
) -> ColorProduct | Factor:
    try:
        return _compute_product(l, t, state, ceiling)
    except FactorFound as found:
        return Factor(found.factor, "color_product")


def order_key(color: ColorPoly) -> tuple[int, int, int]:
    signature = color.signature.value if color.signature is not None else _NO_SIGNATURE
    return (color.degree, signature, color.id)


def _pieces(poly: tuple, h: tuple, h_t: tuple, tower: TowerCtx) -> dict[tuple[int, int], tuple]:
    ring = tower.top
    pieces: dict[tuple[int, int], tuple] = {}
    inside = semisimple_gcd(poly, h, tower, halt=True).gcd
    for a, part in ((1, inside), (0, rp.exact_div(ring, poly, inside))):
        if rp.degree(part) < 1:
            continue
        inner = semisimple_gcd(part, h_t, tower, halt=True).gcd
        for b, piece in ((1, inner), (0, rp.exact_div(ring, part, inner))):
            if rp.degree(piece) >= 1:
                pieces[(a, b)] = piece
    return pieces


_PIECE_ORDER = ((1, 1), (1, 0), (0, 1), (0, 0))


def _split_colors(
    colors: list[ColorPoly],
    h: tuple,
    h_t: tuple,
    tower: TowerCtx,
    next_id: int,
) -> tuple[list[ColorPoly], int, bool]:
    """Intersect every color with h and with h^T, keeping transposes paired."""
    by_id = {c.id: c for c in colors}
    replacements: dict[int, list[ColorPoly]] = {}
    for color in colors:
        if color.id in replacements:
            continue
        own = _pieces(color.poly, h, h_t, tower)
        if color.is_symmetric:
            if len(own) == 1:
                replacements[color.id] = [color]
                continue
            ids = {key: next_id + i for i, key in enumerate(k for k in _PIECE_ORDER if k in own)}
            next_id += len(ids)
            if any((b, a) not in ids for a, b in ids):
                raise InternalInvariantBroken(f"Symmetric color {color.id} split into unpaired pieces.")
            replacements[color.id] = [
                ColorPoly(id=ids[key], poly=own[key], transpose_id=ids[(key[1], key[0])])
                for key in _PIECE_ORDER
                if key in own
            ]
            continue

        partner = by_id[color.transpose_id]
        theirs = _pieces(partner.poly, h, h_t, tower)
        if set(theirs) != {(b, a) for a, b in own}:
            raise InternalInvariantBroken(f"Colors {color.id} and {partner.id} split inconsistently.")
        if len(own) == 1:
            replacements[color.id] = [color]
            replacements[partner.id] = [partner]
            continue
        own_keys = [k for k in _PIECE_ORDER if k in own]
        own_ids = {key: next_id + i for i, key in enumerate(own_keys)}
        next_id += len(own_ids)
        their_ids = {(b, a): next_id + i for i, (a, b) in enumerate(own_keys)}
        next_id += len(their_ids)
        replacements[color.id] = [
            ColorPoly(id=own_ids[key], poly=own[key], transpose_id=their_ids[(key[1], key[0])]) for key in own_keys
        ]
        replacements[partner.id] = [
            ColorPoly(id=their_ids[(b, a)], poly=theirs[(b, a)], transpose_id=own_ids[(a, b)]) for a, b in own_keys
        ]

    refined = [piece for color in colors for piece in replacements[color.id]]
    return refined, next_id, len(refined) != len(colors)


def _all_products(state: ColorSet, ceiling: int) -> dict[tuple[int, int], ColorProduct]:
    ordered = sorted(state.colors, key=order_key)
    full = _full_difference_poly(state)
    products = {}
    for l in ordered:
        for t in ordered:
            products[(l.id, t.id)] = _compute_product(l, t, state, ceiling, full)
    return products


def _product_table(state: ColorSet, products: dict[tuple[int, int], ColorProduct]) -> dict:
    ring = state.tower.top
    table = {}
    for key, product in products.items():
        terms = []
        for part, m in product.parts:
            members = [c for c in state.colors if not rp.rem(ring, part, c.poly)]
            if sum(c.degree for c in members) != rp.degree(part):
                raise InternalInvariantBroken(f"Product {key} does not decompose over the stable colors.")
            terms.extend((c.id, m) for c in members)
        table[key] = tuple(sorted(terms))
    return table


def wl2_implicit(state: ColorSet, *, ceiling: int = DEFAULT_DIMENSION_CEILING) -> Factor | StableColorSet:
    if state.identity is None:
        raise InternalInvariantBroken("Implicit WL needs the identity color.")
    colors = list(state.colors)
    next_id = max(c.id for c in colors) + 1
    for round_no in range(1, state.n + 1):
        current = ColorSet(f=state.f, tower=state.tower, colors=tuple(colors), identity_id=state.identity_id)
        try:
            products = _all_products(current, ceiling)
            changed = False
            for l_id, t_id in products:
                product = products[(l_id, t_id)]
                l, t = current[l_id], current[t_id]
                mirrored = {m: part for part, m in products[(t.transpose_id, l.transpose_id)].parts}
                for part, m in product.parts:
                    if m not in mirrored:
                        raise InternalInvariantBroken(f"Product ({l_id}, {t_id}) has no transposed part of multiplicity {m}.")
                    colors, next_id, split = _split_colors(colors, part, mirrored[m], state.tower, next_id)
                    changed = changed or split
        except FactorFound as found:
            logger.info("Implicit WL found a factor of degree %s in round %s.", found.factor.degree, round_no)
            return Factor(found.factor, "wl2")
        logger.debug("Implicit WL round %s: %s colors.", round_no, len(colors))
        if not changed:
            table = _product_table(current, products)
            logger.info("Implicit WL stable after %s rounds with %s colors.", round_no, len(colors))
            return StableColorSet(
                f=state.f,
                tower=state.tower,
                colors=current.colors,
                identity_id=state.identity_id,
                product_table=table,
                rounds=round_no,
            )
    raise InternalInvariantBroken(f"Implicit WL did not stabilise within {state.n} rounds.")


def sanity_checks(state: StableColorSet) -> ThinSchemeCertificate | None:
    """Structural checks on a stable set; a thin set yields a certificate."""
    ring = state.tower.top
    identity = state.identity
    if identity is None or identity.poly != (ring.zero, ring.one):
        raise InternalInvariantBroken("Stable color set lost the identity color y.")
    for color in state.colors:
        if color.degree < 1 or color.poly[-1] != ring.one:
            raise InternalInvariantBroken(f"Color {color.id} is not monic of positive degree.")
        if state.transpose_of(state.transpose_of(color)).id != color.id:
            raise InternalInvariantBroken(f"Transpose pairing of color {color.id} is not an involution.")
    if sum(c.degree for c in state.non_identity()) != state.n - 1:
        raise InternalInvariantBroken("Non-identity color degrees do not sum to n - 1.")
    if not 2 <= len(state) <= state.n:
        raise InternalInvariantBroken(f"Stable color count {len(state)} outside [2, {state.n}].")
    if len(state) == state.n:
        logger.info("Stable color set is thin (%s colors on %s points).", len(state), state.n)
        return ThinSchemeCertificate(state)
    return None


def materialize_colors(state: ColorSet, roots: Sequence[int]) -> ExplicitColoring:
    """0/1 matrices E_l(i, j) = 1 iff g_l(xi_i - xi_j) vanishes at the idempotent of xi_i."""
    n = len(roots)
    colors = []
    for color in state.colors:
        matrix = np.zeros((n, n), dtype=np.int64)
        for i, xi in enumerate(roots):
            members = color_roots_at(color, state.tower, xi, list(roots))
            for j, xj in enumerate(roots):
                if xj in members:
                    matrix[i, j] = 1
        colors.append(matrix)
    return ExplicitColoring(n, colors)


def dump_color_set(state: ColorSet) -> ColorSetDump:
    colors = [
        ColorDump(
            id=c.id,
            signature=list(c.signature.bits) if c.signature is not None else None,
            transpose_id=c.transpose_id,
            coefficients=[list(coeff) for coeff in c.poly],
        )
        for c in state.colors
    ]
    table = []
    rounds = None
    if isinstance(state, StableColorSet):
        rounds = state.rounds
        table = [
            ProductEntry(left=left, right=right, terms=list(terms))
            for (left, right), terms in sorted(state.product_table.items())
        ]
    return ColorSetDump(
        p=state.ctx.p,
        f=list(state.f.coeffs),
        identity_id=state.identity_id,
        colors=colors,
        rounds=rounds,
        product_table=table,
    )


def load_color_set(dump: ColorSetDump) -> ColorSet:
    ctx = make_field_ctx(dump.p)
    f = FpPoly.of(ctx, dump.f)
    tower = base_tower(f)
    ring = tower.top
    colors = []
    for c in dump.colors:
        if any(len(coeff) > ring.degree for coeff in c.coefficients):
            raise MalformedInput(f"Color {c.id} has a coefficient of degree >= deg f.")
        poly = rp.trim(ring, [ring.from_poly([a % ctx.p for a in coeff]) for coeff in c.coefficients])
        signature = SylowSignature(tuple(c.signature)) if c.signature is not None else None
        colors.append(ColorPoly(id=c.id, poly=poly, transpose_id=c.transpose_id, signature=signature))
    ids = {c.id for c in colors}
    if len(ids) != len(colors) or any(c.transpose_id not in ids for c in colors):
        raise MalformedInput("Color ids must be unique and every transpose id must name a color.")
    if dump.product_table or dump.rounds is not None:
        table = {(e.left, e.right): tuple(tuple(term) for term in e.terms) for e in dump.product_table}
        return StableColorSet(
            f=f,
            tower=tower,
            colors=tuple(colors),
            identity_id=dump.identity_id,
            product_table=table,
            rounds=dump.rounds or 0,
        )
    return ColorSet(f=f, tower=tower, colors=tuple(colors), identity_id=dump.identity_id)
