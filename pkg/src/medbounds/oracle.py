"""Sharp bounds by direct linear programming over the latent polytope.

The primal program minimizes (or maximizes) the parameter's unit contrast
over latent distributions q >= 0 that reproduce the observed cells.  All
arithmetic is rational, so results are exact and infeasibility is a hard
verdict about the data and assumptions rather than a tolerance call.

Latent cells sharing an identical constraint column and objective
coefficient are interchangeable in the program, so they are merged into a
single variable before solving; any optimal mass on the merged variable is
returned on a representative cell.  This roughly halves the variable count
for population systems and is exact.
"""

from __future__ import annotations

from fractions import Fraction

from . import model
from .catalog import BoundResult
from .model import Assumptions, ConstraintSystem, Parameter
from .observed import (
    LocalObservedDistribution,
    ObservedDistribution,
    local_distribution,
)
from .simplex import LpOutcome, SimplexError, solve_min_mixed


def _merged_columns(system: ConstraintSystem, costs: dict) -> list[tuple]:
    """Group cells by (incidence signature, cost); returns per-group
    (representative cell, member positions, row-index tuple, cost)."""
    groups: dict[tuple, list[int]] = {}
    for pos, cell in enumerate(system.cells):
        rows = tuple(
            ridx for ridx, (_, members) in enumerate(system.rows) if pos in members
        )
        groups.setdefault((rows, costs.get(cell, 0)), []).append(pos)
    out = []
    for (rows, cost), positions in sorted(groups.items()):
        out.append((system.cells[positions[0]], positions, rows, cost))
    return out


def solve(
    direction: str,
    costs: dict,
    system: ConstraintSystem,
    targets: list[Fraction],
) -> LpOutcome:
    """Exact primal solve; witness is a latent assignment keyed by cell."""
    if direction not in ("min", "max"):
        raise ValueError(f"direction must be min or max, not {direction!r}")
    if len(targets) != len(system.rows):
        raise ValueError("target count does not match constraint rows")
    merged = _merged_columns(system, costs)
    nrows = len(system.rows)
    sign = 1 if direction == "min" else -1
    col_costs = [Fraction(sign * cost) for _, _, _, cost in merged]
    rows = []
    for ridx in range(nrows):
        rows.append(
            [Fraction(1) if ridx in rowset else Fraction(0) for _, _, rowset, _ in merged]
        )
    out = solve_min_mixed(col_costs, rows, targets, [], [])
    if out.status == "unbounded":
        raise SimplexError(
            "objective unbounded over a subset of the simplex; constraint construction bug"
        )
    if out.status != "optimal":
        return out
    witness = {rep: w for (rep, _, _, _), w in zip(merged, out.witness) if w}
    return LpOutcome(status="optimal", value=sign * out.value, witness=witness)


def _bounds_from_system(
    param: Parameter,
    assume: Assumptions,
    system: ConstraintSystem,
    costs: dict,
    targets: list[Fraction],
) -> BoundResult:
    lo = solve("min", costs, system, targets)
    if lo.status == "infeasible":
        return BoundResult(
            parameter=param,
            assumptions=assume,
            method="oracle",
            lower=None,
            upper=None,
            status="infeasible",
        )
    hi = solve("max", costs, system, targets)
    hi.require_optimal()
    return BoundResult(
        parameter=param,
        assumptions=assume,
        method="oracle",
        lower=lo.value,
        upper=hi.value,
        status="ok",
    )


def oracle_bounds(
    observed: ObservedDistribution, param: Parameter, assume: Assumptions
) -> BoundResult:
    """Sharp [min, max] of the parameter over latent laws matching the data.

    Local parameters are bounded over the complier system with the
    identified complier cells as targets; identification failures there
    (negative cells) surface as LP infeasibility.
    """
    if param.is_local:
        local = local_distribution(observed)
        return local_oracle_bounds(local, param, assume)
    system = model.population_system(assume)
    costs = model.objective(param)
    targets = system.targets(observed.cells())
    return _bounds_from_system(param, assume, system, costs, targets)


def local_oracle_bounds(
    local: LocalObservedDistribution, param: Parameter, assume: Assumptions
) -> BoundResult:
    if not param.is_local:
        raise ValueError(f"{param.name()} is not a complier-stratum parameter")
    system = model.local_system(assume)
    costs = model.local_objective(param)
    targets = system.targets(local.cells())
    return _bounds_from_system(param, assume, system, costs, targets)


def feasibility(observed: ObservedDistribution, assume: Assumptions) -> LpOutcome:
    """Zero-objective probe: can any admissible latent law produce the data?"""
    system = model.population_system(assume)
    return solve("min", {}, system, system.targets(observed.cells()))
