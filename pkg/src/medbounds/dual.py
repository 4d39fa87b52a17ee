"""Symbolic bound derivation by dual vertex enumeration.

The sharp lower bound of a linear functional c.q over the latent
distributions matching observed cells b solves

    min c.q   s.t.  A q = b,  q >= 0,

whose dual is  max b.w  s.t.  A^T w <= c.  The feasible region of the dual
is a polyhedron with one inequality per admissible latent cell, in one
dual coordinate per equality row (observed cells plus normalization).
Strong duality makes every minimal face of that polyhedron a candidate
bound expression b.w, affine in the observed cells; the bound is the max
over them.  Enumerating those faces once therefore yields the closed-form
bound valid for every observed distribution.

Two structural points drive the implementation:

* Each arm's cell rows sum to the normalization row, so the dual
  polyhedron has a two-dimensional lineality space on which b.w vanishes
  identically.  We quotient it out by pinning coordinates, enumerate
  vertices of the pointed quotient, and report images; different pinnings
  shift expressions by multiples of the per-arm sum-to-one relations,
  which is exactly what ``symbolic.normalized`` quotients away.
* Many latent cells share both observed rows; only the tightest
  right-hand side matters, so rows are deduplicated before enumeration.

Vertex enumeration is double description over the homogenization, with
integer-normalized rays, bitmask adjacency tests, and a cut-off ordering
heuristic.  Everything is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import model
from .model import Assumptions, Parameter
from .symbolic import Expr, SymbolicBound, normalized

ZERO = Fraction(0)


class EnumerationError(Exception):
    pass


@dataclass(frozen=True)
class DualPolyhedron:
    """A^T w <= c in coordinates named by ``coord_labels`` (normalization last)."""

    parameter: Parameter
    assumptions: Assumptions
    direction: str
    family: str
    coord_labels: tuple[str, ...]
    rows: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def dim(self) -> int:
        return len(self.coord_labels)


def _population_cell_rows(assume: Assumptions):
    """(coords, cell) pairs: which two observed cells a latent cell feeds, per arm."""
    labels = model.POP_LABELS + (model.NORMALIZATION_LABEL,)
    index = {l: idx for idx, l in enumerate(labels)}
    for cell in model.admissible_cells(assume):
        i, j, k = cell
        coords = [0] * len(labels)
        for z in (0, 1):
            a = model.uptake(k, z)
            m = model.mediator(j, a)
            y = model.outcome(i, a, m)
            coords[index[model.pop_label(y, m, a, z)]] += 1
        coords[-1] += 1
        yield tuple(coords), cell


def _local_cell_rows(assume: Assumptions):
    labels = model.LOCAL_LABELS + (model.NORMALIZATION_LABEL,)
    index = {l: idx for idx, l in enumerate(labels)}
    for cell in model.admissible_local_cells(assume):
        i, j = cell
        coords = [0] * len(labels)
        for z in (0, 1):
            m = model.mediator(j, z)
            y = model.outcome(i, z, m)
            coords[index[model.local_label(y, m, z)]] += 1
        coords[-1] += 1
        yield tuple(coords), cell


def build_dual(param: Parameter, assume: Assumptions, direction: str) -> DualPolyhedron:
    """Dual polyhedron whose vertex images are the ``direction`` bound entries.

    Upper bounds run the primal as a maximization, realized by negating the
    objective here and negating the resulting expressions afterwards.
    """
    if direction not in ("lower", "upper"):
        raise ValueError(f"bad direction: {direction!r}")
    if param.is_local:
        if not assume.a4:
            raise ValueError("local parameters need monotone compliance (a4)")
        family = "local"
        labels = model.LOCAL_LABELS + (model.NORMALIZATION_LABEL,)
        coeffs = model.local_objective(param)
        cell_rows = _local_cell_rows(assume)
    else:
        family = "population"
        labels = model.POP_LABELS + (model.NORMALIZATION_LABEL,)
        coeffs = model.objective(param)
        cell_rows = _population_cell_rows(assume)
    sign = 1 if direction == "lower" else -1
    rows = tuple(
        (coords, sign * coeffs.get(cell, 0)) for coords, cell in cell_rows
    )
    return DualPolyhedron(
        parameter=param,
        assumptions=assume,
        direction=direction,
        family=family,
        coord_labels=labels,
        rows=rows,
    )


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), ZERO)


def _primitive(vec: list[Fraction]) -> tuple[Fraction, ...]:
    """Scale to a primitive integer vector, preserving direction."""
    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(Fraction(x) for x in ints)


def _nullspace(rows: list[tuple[int, ...]], dim: int) -> list[tuple[Fraction, ...]]:
    """Basis of {v : r.v = 0 for all r}, by fraction-free-ish Gaussian elimination."""
    mat = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(dim):
        pr = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pr is None:
            continue
        mat[rank], mat[pr] = mat[pr], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * dim
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -mat[r][fc]
        basis.append(tuple(v))
    return basis


def _rref_pivot_columns(vectors: list[tuple[Fraction, ...]]) -> list[int]:
    mat = [list(v) for v in vectors]
    pivots = []
    rank = 0
    for col in range(len(mat[0]) if mat else 0):
        pr = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pr is None:
            continue
        mat[rank], mat[pr] = mat[pr], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
    return pivots


# ---------------------------------------------------------------------------
# double description over the homogenization


def _cone_extreme_rays(rows: list[tuple[Fraction, ...]], dim: int):
    """Extreme rays of {x : r.x <= 0 for every r}; raises if lineality survives.

    Maintains (lines, rays) with per-ray bitmasks of tight processed rows.
    Rows are inserted by a most-cut-off-first heuristic to keep the
    intermediate ray count down; the choice is deterministic.
    """
    lines: list[tuple[Fraction, ...]] = [
        tuple(Fraction(int(c == d)) for c in range(dim)) for d in range(dim)
    ]
    rays: list[tuple[tuple[Fraction, ...], int]] = []
    remaining = list(range(len(rows)))
    processed = 0

    while remaining:
        if lines:
            # any row not orthogonal to the line span must come first
            pick = next(
                (t for t in remaining if any(_dot(rows[t], l) != 0 for l in lines)),
                remaining[0],
            )
        else:
            cut = {t: sum(1 for v, _ in rays if _dot(rows[t], v) > 0) for t in remaining}
            pick = max(remaining, key=lambda t: (cut[t], -t))
        remaining.remove(pick)
        row = rows[pick]
        bit = 1 << processed
        mask_prev = bit - 1
        processed += 1

        pl = next((l for l in lines if _dot(row, l) != 0), None)
        if pl is not None:
            alpha = _dot(row, pl)
            newlines = []
            for l in lines:
                if l is pl:
                    continue
                f = _dot(row, l) / alpha
                vec = [a - f * b for a, b in zip(l, pl)]
                if any(x != 0 for x in vec):
                    newlines.append(_primitive(vec))
            lines = newlines
            adjusted = []
            for v, mask in rays:
                d = _dot(row, v)
                if d:
                    v = _primitive([a - (d / alpha) * b for a, b in zip(v, pl)])
                adjusted.append((v, mask | bit))
            rp = tuple(-x for x in pl) if alpha > 0 else pl
            adjusted.append((_primitive(list(rp)), mask_prev))
            rays = adjusted
            continue

        neg, zero, pos = [], [], []
        for v, mask in rays:
            d = _dot(row, v)
            if d < 0:
                neg.append((v, mask, d))
            elif d == 0:
                zero.append((v, mask | bit))
            else:
                pos.append((v, mask, d))
        if not pos:
            rays = [(v, m) for v, m, _ in neg] + zero
            continue
        combos = []
        all_masks = [m for _, m, _ in neg] + [m for _, m in zero] + [m for _, m, _ in pos]
        for (nv, nmask, nd), (pv, pmask, pd) in itertools.product(neg, pos):
            common = nmask & pmask
            if any(
                om != nmask and om != pmask and om & common == common
                for om in all_masks
            ):
                continue
            vec = _primitive([pd * a - nd * b for a, b in zip(nv, pv)])
            combos.append((vec, common | bit))
        rays = [(v, m) for v, m, _ in neg] + zero + combos
        seen = {}
        for v, m in rays:
            seen.setdefault(v, m)
        rays = [(v, m) for v, m in seen.items()]

    if lines:
        raise EnumerationError("cone is not pointed; lineality was not fully pinned")
    return [v for v, _ in rays]


def enumerate_vertices(poly: DualPolyhedron) -> tuple[tuple[Fraction, ...], ...]:
    """All minimal-face representatives of the dual polyhedron, full coordinates.

    Representatives are chosen by zeroing one pinned coordinate per
    lineality direction; recession rays are discarded (the primal optimum
    is finite, so no ray can carry it).
    """
    # deduplicate: identical left-hand sides keep the tightest bound
    tightest: dict[tuple[int, ...], int] = {}
    for coords, rhs in poly.rows:
        if coords not in tightest or rhs < tightest[coords]:
            tightest[coords] = rhs
    dedup = sorted(tightest.items())
    dim = poly.dim

    lineality = _nullspace([coords for coords, _ in dedup], dim)
    pinned = _rref_pivot_columns(lineality) if lineality else []
    keep = [c for c in range(dim) if c not in pinned]

    # homogenize: (v, t) with U v - c t <= 0 and -t <= 0
    hom_rows: list[tuple[Fraction, ...]] = []
    for coords, rhs in dedup:
        hom_rows.append(tuple(Fraction(coords[c]) for c in keep) + (Fraction(-rhs),))
    hom_rows.append(tuple(ZERO for _ in keep) + (Fraction(-1),))

    rays = _cone_extreme_rays(hom_rows, len(keep) + 1)

    vertices = []
    for ray in rays:
        t = ray[-1]
        if t == 0:
            continue  # recession direction
        if t < 0:
            raise EnumerationError("ray violates homogenization sign")
        point = [x / t for x in ray[:-1]]
        full = [ZERO] * dim
        for c, x in zip(keep, point):
            full[c] = x
        vertices.append(tuple(full))
    if not vertices:
        raise EnumerationError("dual polyhedron has no minimal face; check inputs")
    return tuple(sorted(vertices))


def vertices_to_symbolic(
    vertices: tuple[tuple[Fraction, ...], ...], poly: DualPolyhedron
) -> SymbolicBound:
    """Map vertices to bound entries b.w; negates back for upper bounds."""
    entries = []
    seen = set()
    for w in vertices:
        coef = {}
        const = w[-1]
        for label, x in zip(poly.coord_labels[:-1], w):
            coef[label] = x
        if any(x.denominator != 1 for x in list(coef.values()) + [const]):
            raise EnumerationError(
                "vertex image has non-integer coefficients; enumeration bug"
            )
        expr = Expr.make({l: int(x) for l, x in coef.items()}, int(const))
        if poly.direction == "upper":
            expr = -expr
        key = normalized(expr, poly.family)
        if key not in seen:
            seen.add(key)
            entries.append(expr)
    entries.sort(key=lambda e: (e.terms, e.const))
    return SymbolicBound(direction=poly.direction, entries=tuple(entries))


def derive_bound(param: Parameter, assume: Assumptions, direction: str) -> SymbolicBound:
    poly = build_dual(param, assume, direction)
    return vertices_to_symbolic(enumerate_vertices(poly), poly)


def minimal_entries(bound: SymbolicBound, param: Parameter, assume: Assumptions) -> SymbolicBound:
    """Optional post-pass: drop entries never active anywhere on the feasible set.

    An entry is redundant for a lower bound if, for every latent
    distribution under the assumptions, some other entry evaluates at least
    as high on the implied observables (dually for upper bounds).  Each
    test is one exact LP over the latent simplex.
    """
    from .simplex import solve_min_mixed

    if param.is_local:
        system = model.local_system(assume)
    else:
        system = model.population_system(assume)
    labels = [label for label, _ in system.rows[:-1]]
    ncells = len(system.cells)

    def expr_cell_vector(expr: Expr) -> list[Fraction]:
        # expression as a linear functional of the latent mass (constant folded
        # in via the normalization: sum q = 1)
        vec = [Fraction(expr.const)] * ncells
        coefs = expr.coef()
        for row_idx, label in enumerate(labels):
            c = coefs.get(label, 0)
            if c:
                for pos in system.rows[row_idx][1]:
                    vec[pos] += c
        return vec

    entries = list(bound.entries)
    sign = 1 if bound.direction == "lower" else -1
    kept = list(entries)
    for entry in entries:
        others = [e for e in kept if e is not entry]
        if not others:
            continue
        evec = expr_cell_vector(entry)
        # maximize min_e' sign*(entry - e') == max t st t <= sign*(entry-e').q
        # variables: q (ncells) + t split into t+ - t-
        eq_rows = [[1] * ncells + [0, 0]]
        eq_rhs = [1]
        le_rows = []
        le_rhs = []
        for other in others:
            ovec = expr_cell_vector(other)
            diff = [sign * (a - b) for a, b in zip(evec, ovec)]
            le_rows.append([-d for d in diff] + [1, -1])
            le_rhs.append(0)
        costs = [0] * ncells + [-1, 1]  # maximize t
        out = solve_min_mixed(costs, eq_rows, eq_rhs, le_rows, le_rhs)
        if out.status == "optimal" and -out.value <= 0:
            kept.remove(entry)
    return SymbolicBound(direction=bound.direction, entries=tuple(kept))
