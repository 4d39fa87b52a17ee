"""Closed-form bound catalog: load, look up, and evaluate stored formulas.

Formulas live in ``formulas/*.json``, one file per assumption combination
and family.  Entries are max-of / min-of lists of affine expressions in the
observed (or complier) cells.  The unassisted population combination shares
its formula objects with monotone compliance: adding that assumption only
restricts latent strata that never affect the observable implications of
the population system, so the forms coincide and the lookup returns the
identical objects for both.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable

from .model import Assumptions, Parameter
from .observed import (
    IdentificationError,
    LocalObservedDistribution,
    ObservedDistribution,
    late,
    local_distribution,
)
from .symbolic import Expr, SymbolicBound

TAU_LOCAL = Expr.make({"p00.0": 1, "p00.1": -1, "p01.0": 1, "p01.1": -1}, 0)


class UncatalogedError(LookupError):
    """The requested combination has no stored closed form; use the oracle."""


@dataclass(frozen=True)
class BoundFormula:
    """One direction of a catalog bound: extremum over affine entries."""

    parameter: Parameter
    assumptions: Assumptions
    direction: str
    entries: tuple[Expr, ...]

    def symbolic(self) -> SymbolicBound:
        return SymbolicBound(direction=self.direction, entries=self.entries)

    def evaluate(self, cells) -> tuple[Fraction, Expr]:
        return self.symbolic().evaluate(cells)


@dataclass(frozen=True)
class BoundResult:
    """An evaluated interval with the entries that attained each endpoint.

    ``status`` is "ok" when the interval is an honest interval, "crossed"
    when lower exceeds upper (only possible when the data are infeasible
    for the assumption set), and "infeasible" when a hard violation was
    detected.  Catalog evaluation still reports the formally evaluated
    endpoints alongside an infeasible status; the oracle reports no
    endpoints because its program has no optimum to report.
    """

    parameter: Parameter
    assumptions: Assumptions
    method: str
    lower: Fraction | None
    upper: Fraction | None
    status: str
    active_lower: Expr | None = None
    active_upper: Expr | None = None

    def width(self) -> Fraction:
        return self.upper - self.lower


def _load_catalog():
    catalog: dict[tuple[str, tuple[str, ...]], dict] = {}
    root = resources.files("medbounds") / "formulas"
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".json"):
            continue
        payload = json.loads(entry.read_text())
        assume = Assumptions.from_flags(payload["assumptions"])
        bounds = {}
        for record in payload["bounds"]:
            param = Parameter(record["parameter"], record["arm"])
            entries = tuple(
                Expr.make(e["coef"], e["const"]) for e in record["entries"]
            )
            bounds[(param, record["direction"])] = BoundFormula(
                parameter=param,
                assumptions=assume,
                direction=record["direction"],
                entries=entries,
            )
        catalog[(payload["family"], assume.flags())] = bounds
    # monotone compliance leaves the population forms unchanged
    base = catalog[("population", ())]
    catalog[("population", ("a4",))] = base
    return catalog


_CATALOG = _load_catalog()


def cataloged_combinations(family: str) -> list[Assumptions]:
    out = [
        Assumptions.from_flags(flags)
        for fam, flags in _CATALOG
        if fam == family
    ]
    return sorted(out, key=lambda a: (len(a.flags()), a.flags()))


def lookup(param: Parameter, assume: Assumptions) -> tuple[BoundFormula, BoundFormula]:
    """Stored (lower, upper) formulas, or UncatalogedError.

    Local effect formulas are stored for the mediation contrast only; the
    direct-effect forms follow from it and the identified total effect, so
    callers wanting those go through lnde_bounds.
    """
    family = "local" if param.is_local else "population"
    key = param if param.kind != "lnde" else Parameter("lacme", param.arm)
    try:
        bounds = _CATALOG[(family, assume.flags())]
    except KeyError:
        raise UncatalogedError(
            f"no stored formulas for {family} assumptions {assume.label()}; "
            "the oracle can still compute these bounds"
        ) from None
    if (key, "lower") not in bounds:
        raise UncatalogedError(
            f"parameter {param.name()} has no stored closed form; "
            "the oracle can still compute these bounds"
        )
    return bounds[(key, "lower")], bounds[(key, "upper")]


def _result(param, assume, lo, lo_expr, hi, hi_expr, proper=True) -> BoundResult:
    if not proper:
        status = "infeasible"
    elif lo > hi:
        status = "crossed"
    else:
        status = "ok"
    return BoundResult(
        parameter=param,
        assumptions=assume,
        method="catalog",
        lower=lo,
        upper=hi,
        status=status,
        active_lower=lo_expr,
        active_upper=hi_expr,
    )


def evaluate_population(
    param: Parameter, assume: Assumptions, observed: ObservedDistribution
) -> BoundResult:
    lower, upper = lookup(param, assume)
    lo, lo_expr = lower.evaluate(observed.cells())
    hi, hi_expr = upper.evaluate(observed.cells())
    return _result(param, assume, lo, lo_expr, hi, hi_expr)


def evaluate_local(
    param: Parameter, assume: Assumptions, local: LocalObservedDistribution
) -> BoundResult:
    """Evaluate a complier-stratum bound on identified complier cells."""
    if param.kind == "late":
        value = TAU_LOCAL.evaluate(local.cells())
        return _result(
            param, assume, value, TAU_LOCAL, value, TAU_LOCAL, proper=local.is_proper
        )
    if param.kind == "lnde":
        return lnde_bounds(param.arm, assume, local)
    lower, upper = lookup(param, assume)
    lo, lo_expr = lower.evaluate(local.cells())
    hi, hi_expr = upper.evaluate(local.cells())
    return _result(param, assume, lo, lo_expr, hi, hi_expr, proper=local.is_proper)


def lnde_bounds(
    arm: int, assume: Assumptions, local: LocalObservedDistribution
) -> BoundResult:
    """Direct-effect bounds from the identified total effect minus the
    mediation bounds for the opposite arm.

    The two unit contrasts sum to the total contrast when paired this way,
    so subtracting the reversed-arm mediation interval from the identified
    total effect is exact, not conservative.
    """
    mediation = evaluate_local(Parameter("lacme", 1 - arm), assume, local)
    tau = TAU_LOCAL.evaluate(local.cells())
    return BoundResult(
        parameter=Parameter("lnde", arm),
        assumptions=assume,
        method="catalog",
        lower=tau - mediation.upper,
        upper=tau - mediation.lower,
        status=mediation.status,
        active_lower=TAU_LOCAL - mediation.active_upper,
        active_upper=TAU_LOCAL - mediation.active_lower,
    )


def evaluate(
    param: Parameter, assume: Assumptions, observed: ObservedDistribution
) -> BoundResult:
    """Catalog bounds for any parameter straight from observed cells."""
    if param.is_local:
        return evaluate_local(param, assume, local_distribution(observed))
    if param.kind == "ate":
        raise UncatalogedError(
            "ate has no stored closed form; the oracle can still compute its bounds"
        )
    return evaluate_population(param, assume, observed)
