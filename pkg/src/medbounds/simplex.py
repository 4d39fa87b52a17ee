"""Two-phase primal simplex in exact rational arithmetic.

Problems here are small (at most a few hundred columns, under twenty
equality rows), so the solver favors correctness over speed: dense
tableau, Fraction entries everywhere, and Bland's least-index pivoting
rule, which rules out cycling even on the heavily degenerate instances
the latent-cell polytopes produce.

Infeasibility is a first-class outcome, not an exception: detecting that
observed data admit no latent distribution under an assumption set is an
analytic result the callers want to report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class SimplexError(Exception):
    pass


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    witness: tuple[Fraction, ...] | None = None

    def require_optimal(self) -> "LpOutcome":
        if self.status != "optimal":
            raise SimplexError(f"expected an optimal outcome, got {self.status}")
        return self


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tableau[row][col]
    if piv == 0:
        raise SimplexError("zero pivot")
    inv = ONE / piv
    tableau[row] = [x * inv for x in tableau[row]]
    prow = tableau[row]
    for r, tr in enumerate(tableau):
        if r == row:
            continue
        f = tr[col]
        if f:
            tableau[r] = [a - f * b for a, b in zip(tr, prow)]
    basis[row] = col


def _bland_min(tableau: list[list[Fraction]], basis: list[int], ncols: int) -> str:
    """Run phase iterations on a tableau whose last row is the reduced-cost row.

    Minimizes; returns "optimal" or "unbounded".  Entering column: smallest
    index with negative reduced cost.  Leaving row: minimum ratio, ties
    broken by smallest basic-variable index.
    """
    cost = tableau[-1]
    m = len(tableau) - 1
    while True:
        col = next((j for j in range(ncols) if cost[j] < 0), None)
        if col is None:
            return "optimal"
        best_ratio = None
        best_row = None
        for r in range(m):
            a = tableau[r][col]
            if a > 0:
                ratio = tableau[r][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[best_row])
                ):
                    best_ratio = ratio
                    best_row = r
        if best_row is None:
            return "unbounded"
        _pivot(tableau, basis, best_row, col)
        cost = tableau[-1]


def solve_min(
    costs: Sequence[Fraction | int],
    rows: Sequence[Sequence[Fraction | int]],
    rhs: Sequence[Fraction | int],
) -> LpOutcome:
    """Minimize costs.x subject to rows.x = rhs and x >= 0."""
    n = len(costs)
    m = len(rows)
    if len(rhs) != m or any(len(r) != n for r in rows):
        raise SimplexError("inconsistent constraint dimensions")
    c = [Fraction(v) for v in costs]

    # Phase one: minimize the total artificial mass.
    tableau: list[list[Fraction]] = []
    for r in range(m):
        arow = [Fraction(v) for v in rows[r]]
        b = Fraction(rhs[r])
        if b < 0:
            arow = [-v for v in arow]
            b = -b
        art = [ZERO] * m
        art[r] = ONE
        tableau.append(arow + art + [b])
    basis = [n + r for r in range(m)]
    width = n + m
    cost_row = [ZERO] * n + [ONE] * m + [ZERO]
    for r in range(m):
        cost_row = [a - b for a, b in zip(cost_row, tableau[r])]
    tableau.append(cost_row)
    if _bland_min(tableau, basis, width) != "optimal":
        raise SimplexError("phase one cannot be unbounded")  # artificials are bounded below
    if -tableau[-1][-1] != 0:
        return LpOutcome(status="infeasible")

    # Remove artificials from the basis (pivot out, or drop redundant rows).
    drop: list[int] = []
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if tableau[r][j] != 0), None)
            if col is None:
                drop.append(r)
            else:
                _pivot(tableau, basis, r, col)
    for r in sorted(drop, reverse=True):
        del tableau[r], basis[r]

    # Phase two on structural columns only.
    tableau = [row[:n] + [row[-1]] for row in tableau[:-1]]
    cost_row = c + [ZERO]
    for r, tr in enumerate(tableau):
        f = cost_row[basis[r]]
        if f:
            cost_row = [a - f * b for a, b in zip(cost_row, tr)]
    tableau.append(cost_row)
    if _bland_min(tableau, basis, n) == "unbounded":
        return LpOutcome(status="unbounded")

    x = [ZERO] * n
    for r, tr in enumerate(tableau[:-1]):
        x[basis[r]] = tr[-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), ZERO)
    assert value == -tableau[-1][-1]
    return LpOutcome(status="optimal", value=value, witness=tuple(x))


def solve_max(
    costs: Sequence[Fraction | int],
    rows: Sequence[Sequence[Fraction | int]],
    rhs: Sequence[Fraction | int],
) -> LpOutcome:
    """Maximize costs.x subject to rows.x = rhs and x >= 0."""
    out = solve_min([-Fraction(v) for v in costs], rows, rhs)
    if out.status != "optimal":
        return out
    return LpOutcome(status="optimal", value=-out.value, witness=out.witness)


def solve_min_mixed(
    costs: Sequence[Fraction | int],
    eq_rows: Sequence[Sequence[Fraction | int]],
    eq_rhs: Sequence[Fraction | int],
    le_rows: Sequence[Sequence[Fraction | int]] = (),
    le_rhs: Sequence[Fraction | int] = (),
) -> LpOutcome:
    """Minimize with equality and <= rows; slack columns are added here.

    The witness is truncated to the structural variables.
    """
    n = len(costs)
    k = len(le_rows)
    rows = [list(r) + [0] * k for r in eq_rows]
    for idx, r in enumerate(le_rows):
        slack = [0] * k
        slack[idx] = 1
        rows.append(list(r) + slack)
    out = solve_min(list(costs) + [0] * k, rows, list(eq_rhs) + list(le_rhs))
    if out.status != "optimal":
        return out
    return LpOutcome(status="optimal", value=out.value, witness=out.witness[:n])
