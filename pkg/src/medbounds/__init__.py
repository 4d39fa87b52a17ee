"""Partial-identification toolkit for mediation effects under noncompliance.

The public surface: estimate observed cell laws from count data, evaluate
stored closed-form bounds, solve the exact rational LP oracle, derive
closed forms by dual vertex enumeration, and replay seeded ground-truth
worlds for property testing.
"""

from .catalog import BoundFormula, BoundResult, UncatalogedError, cataloged_combinations, evaluate
from .dataio import CountTable, FeasibilityReport, ParseError, check_feasibility, estimate, parse_table
from .dual import derive_bound, minimal_entries
from .model import Assumptions, Parameter
from .observed import (
    IdentificationError,
    LocalObservedDistribution,
    ObservedDistribution,
    late,
    local_distribution,
)
from .oracle import feasibility, oracle_bounds
from .sim import SimulatedWorld, run_property_suite
from .symbolic import Expr, SymbolicBound

__version__ = "0.1.0"

__all__ = [
    "Assumptions",
    "BoundFormula",
    "BoundResult",
    "CountTable",
    "Expr",
    "FeasibilityReport",
    "IdentificationError",
    "LocalObservedDistribution",
    "ObservedDistribution",
    "ParseError",
    "Parameter",
    "SimulatedWorld",
    "SymbolicBound",
    "UncatalogedError",
    "cataloged_combinations",
    "check_feasibility",
    "derive_bound",
    "estimate",
    "evaluate",
    "feasibility",
    "late",
    "local_distribution",
    "minimal_entries",
    "oracle_bounds",
    "parse_table",
    "run_property_suite",
]
