"""Latent response-type model for a binary instrument/treatment/mediator/outcome chain.

The observables are four binary variables: randomized assignment ``Z``,
treatment actually taken ``A``, mediator ``M``, and outcome ``Y``.  A unit's
unobserved character is its response type: the full vector of potential
values ``(Y(1,1), Y(1,0), Y(0,1), Y(0,0))`` for the outcome under each
(treatment, mediator) pair, ``(M(1), M(0))`` for the mediator under each
treatment, and ``(A(1), A(0))`` for treatment uptake under each assignment.
Assignment is excluded from ``M`` and ``Y`` except through ``A``.

Response types are indexed by integers: ``i`` in 0..15 for the outcome
vector, ``j`` in 0..3 for the mediator pair, ``k`` in 0..3 for the uptake
pair.  The decoding convention is frozen here and used by every other
module: index 0 maps to the all-ones vector and the encoded bits descend
from the first component, so component ``s`` (0-based) of the decoded tuple
is the complement of bit ``(width-1-s)`` of the index.  Concretely
``decode_y(5) == (1, 0, 1, 0)`` and ``decode_m(2) == (0, 1)``.

A joint law ``q`` over the 256 cells ``(i, j, k)`` pushes forward to the
observed per-arm cell probabilities P(Y=y, M=m, A=a | Z=z), which is the
equality-constraint system built at the bottom of this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

Cell = tuple[int, int, int]
LocalCell = tuple[int, int]

#: all (y, m, a, z) observed-cell keys, lexicographic
POP_KEYS: tuple[tuple[int, int, int, int], ...] = tuple(
    itertools.product((0, 1), repeat=4)
)
#: all (y, m, z) complier observed-cell keys, lexicographic
LOCAL_KEYS: tuple[tuple[int, int, int], ...] = tuple(
    itertools.product((0, 1), repeat=3)
)

NORMALIZATION_LABEL = "1"


def decode_y(i: int) -> tuple[int, int, int, int]:
    """Outcome response type ``i`` -> (Y(1,1), Y(1,0), Y(0,1), Y(0,0))."""
    if not 0 <= i <= 15:
        raise ValueError(f"outcome response index out of range: {i}")
    return tuple(1 - ((i >> s) & 1) for s in (3, 2, 1, 0))  # type: ignore[return-value]


def decode_m(j: int) -> tuple[int, int]:
    """Mediator response type ``j`` -> (M(1), M(0))."""
    if not 0 <= j <= 3:
        raise ValueError(f"mediator response index out of range: {j}")
    return tuple(1 - ((j >> s) & 1) for s in (1, 0))  # type: ignore[return-value]


def decode_a(k: int) -> tuple[int, int]:
    """Uptake response type ``k`` -> (A(1), A(0)).  Same 2-bit code as decode_m."""
    if not 0 <= k <= 3:
        raise ValueError(f"uptake response index out of range: {k}")
    return tuple(1 - ((k >> s) & 1) for s in (1, 0))  # type: ignore[return-value]


def encode_y(bits: tuple[int, int, int, int]) -> int:
    return sum((1 - b) << s for b, s in zip(bits, (3, 2, 1, 0)))


def encode_m(bits: tuple[int, int]) -> int:
    return sum((1 - b) << s for b, s in zip(bits, (1, 0)))


def outcome(i: int, a: int, m: int) -> int:
    """Y(a, m) for outcome response type i."""
    return decode_y(i)[2 * (1 - a) + (1 - m)]


def mediator(j: int, a: int) -> int:
    """M(a) for mediator response type j."""
    return decode_m(j)[1 - a]


def uptake(k: int, z: int) -> int:
    """A(z) for uptake response type k."""
    return decode_a(k)[1 - z]


@dataclass(frozen=True, order=True)
class Assumptions:
    """Monotonicity restrictions layered on top of the always-on design
    assumptions (exclusion of Z, relevance, randomization).

    a4: monotone compliance, A(1) >= A(0) for every unit (no defiers).
    a5: monotone mediator response, M(1) >= M(0).
    a6: monotone outcome in the mediator, Y(a,1) >= Y(a,0) for both a.
    a7: monotone outcome in treatment, Y(1,m) >= Y(0,m) for both m.
    """

    a4: bool = False
    a5: bool = False
    a6: bool = False
    a7: bool = False

    NAMES = ("a4", "a5", "a6", "a7")

    def flags(self) -> tuple[str, ...]:
        return tuple(n for n in self.NAMES if getattr(self, n))

    def label(self) -> str:
        return "+".join(self.flags()) or "none"

    def union(self, other: "Assumptions") -> "Assumptions":
        return Assumptions(*(getattr(self, n) or getattr(other, n) for n in self.NAMES))

    def issubset(self, other: "Assumptions") -> bool:
        return all(getattr(other, n) for n in self.flags())

    @classmethod
    def from_flags(cls, names: Iterable[str]) -> "Assumptions":
        kwargs = {}
        for name in names:
            name = name.strip().lower()
            if name in ("", "none"):
                continue
            if name not in cls.NAMES:
                raise ValueError(f"unknown assumption flag: {name!r}")
            kwargs[name] = True
        return cls(**kwargs)

    @classmethod
    def parse(cls, text: str) -> "Assumptions":
        return cls.from_flags(text.replace("+", ",").split(","))


def cell_admissible(cell: Cell, assume: Assumptions) -> bool:
    i, j, k = cell
    y11, y10, y01, y00 = decode_y(i)
    if assume.a4 and decode_a(k)[0] < decode_a(k)[1]:
        return False
    if assume.a5 and decode_m(j)[0] < decode_m(j)[1]:
        return False
    if assume.a6 and (y11 < y10 or y01 < y00):
        return False
    if assume.a7 and (y11 < y01 or y10 < y00):
        return False
    return True


def admissible_cells(assume: Assumptions) -> tuple[Cell, ...]:
    """All latent cells with unconstrained mass under ``assume``, in index order."""
    return tuple(
        cell
        for cell in itertools.product(range(16), range(4), range(4))
        if cell_admissible(cell, assume)
    )


def admissible_local_cells(assume: Assumptions) -> tuple[LocalCell, ...]:
    """Complier-stratum cells (i, j); the uptake type is fixed, so a4 prunes nothing."""
    return tuple(
        (i, j)
        for i, j in itertools.product(range(16), range(4))
        if cell_admissible((i, j, 1), assume)
    )


def cell_incidence(y: int, m: int, a: int, z: int) -> frozenset[Cell]:
    """Latent cells observed as (Y=y, M=m, A=a) in assignment arm z."""
    return frozenset(
        (i, j, k)
        for i, j, k in itertools.product(range(16), range(4), range(4))
        if uptake(k, z) == a and mediator(j, a) == m and outcome(i, a, m) == y
    )


def local_cell_incidence(y: int, m: int, z: int) -> frozenset[LocalCell]:
    """Complier cells observed as (Y=y, M=m) in arm z (compliers take A=z)."""
    return frozenset(
        (i, j)
        for i, j in itertools.product(range(16), range(4))
        if mediator(j, z) == m and outcome(i, z, m) == y
    )


def pop_label(y: int, m: int, a: int, z: int) -> str:
    return f"p{y}{m}{a}.{z}"


def local_label(y: int, m: int, z: int) -> str:
    return f"p{y}{m}.{z}"


POP_LABELS: tuple[str, ...] = tuple(pop_label(*key) for key in POP_KEYS)
LOCAL_LABELS: tuple[str, ...] = tuple(local_label(*key) for key in LOCAL_KEYS)

POPULATION_KINDS = ("acme", "nde", "ate")
LOCAL_KINDS = ("lacme", "lnde", "late")
ARMLESS_KINDS = ("ate", "late")


@dataclass(frozen=True, order=True)
class Parameter:
    """A causal estimand: kind plus treatment arm (arm is None for ate/late)."""

    kind: str
    arm: int | None = None

    def __post_init__(self):
        if self.kind not in POPULATION_KINDS + LOCAL_KINDS:
            raise ValueError(f"unknown parameter kind: {self.kind!r}")
        if self.kind in ARMLESS_KINDS:
            if self.arm is not None:
                raise ValueError(f"{self.kind} takes no arm")
        elif self.arm not in (0, 1):
            raise ValueError(f"{self.kind} needs arm 0 or 1")

    @property
    def is_local(self) -> bool:
        return self.kind in LOCAL_KINDS

    def name(self) -> str:
        if self.arm is None:
            return self.kind
        return f"{self.kind}({self.arm})"

    @classmethod
    def parse(cls, text: str) -> "Parameter":
        text = text.strip().lower()
        if "(" in text:
            kind, rest = text.split("(", 1)
            return cls(kind, int(rest.rstrip(")")))
        if text in ARMLESS_KINDS:
            return cls(text)
        raise ValueError(f"cannot parse parameter {text!r}; use e.g. acme(1) or late")


def _unit_contrast(param: Parameter, i: int, j: int) -> int:
    """Unit-level effect for a response type; identical for the local twins."""
    kind = param.kind
    if kind in ("acme", "lacme"):
        a = param.arm
        return outcome(i, a, mediator(j, 1)) - outcome(i, a, mediator(j, 0))
    if kind in ("nde", "lnde"):
        m = mediator(j, param.arm)
        return outcome(i, 1, m) - outcome(i, 0, m)
    # ate / late
    return outcome(i, 1, mediator(j, 1)) - outcome(i, 0, mediator(j, 0))


def objective(param: Parameter) -> dict[Cell, int]:
    """Coefficient of each latent cell in the population functional (nonzeros only)."""
    if param.is_local:
        raise ValueError(f"{param.name()} lives on the complier system")
    coeffs = {}
    for i, j in itertools.product(range(16), range(4)):
        c = _unit_contrast(param, i, j)
        if c:
            for k in range(4):
                coeffs[(i, j, k)] = c
    return coeffs


def local_objective(param: Parameter) -> dict[LocalCell, int]:
    """Coefficient of each complier cell in the local functional (nonzeros only)."""
    if not param.is_local:
        raise ValueError(f"{param.name()} lives on the population system")
    coeffs = {}
    for i, j in itertools.product(range(16), range(4)):
        c = _unit_contrast(param, i, j)
        if c:
            coeffs[(i, j)] = c
    return coeffs


@dataclass(frozen=True)
class ConstraintSystem:
    """Equality constraints tying latent mass to observed cells.

    ``rows`` pairs each observed-cell label with the positions (into
    ``cells``) of the latent cells it aggregates; the final row is the
    normalization (every cell, target 1).  Row order follows POP_KEYS /
    LOCAL_KEYS with the normalization last, which the dual construction
    relies on.
    """

    cells: tuple[tuple[int, ...], ...]
    rows: tuple[tuple[str, frozenset[int]], ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.rows)

    def matrix(self) -> list[list[int]]:
        n = len(self.cells)
        return [[1 if c in members else 0 for c in range(n)] for _, members in self.rows]

    def targets(self, observed: Mapping[str, Fraction]) -> list[Fraction]:
        """Right-hand sides in row order; the normalization target is 1."""
        out = []
        for label, _ in self.rows[:-1]:
            out.append(Fraction(observed[label]))
        out.append(Fraction(1))
        return out


def population_system(assume: Assumptions) -> ConstraintSystem:
    cells = admissible_cells(assume)
    position = {cell: idx for idx, cell in enumerate(cells)}
    rows = []
    for y, m, a, z in POP_KEYS:
        members = frozenset(
            position[cell] for cell in cell_incidence(y, m, a, z) if cell in position
        )
        rows.append((pop_label(y, m, a, z), members))
    rows.append((NORMALIZATION_LABEL, frozenset(range(len(cells)))))
    return ConstraintSystem(cells=cells, rows=tuple(rows))


def local_system(assume: Assumptions) -> ConstraintSystem:
    if not assume.a4:
        raise ValueError("the complier system needs monotone compliance (a4)")
    cells = admissible_local_cells(assume)
    position = {cell: idx for idx, cell in enumerate(cells)}
    rows = []
    for y, m, z in LOCAL_KEYS:
        members = frozenset(
            position[cell]
            for cell in local_cell_incidence(y, m, z)
            if cell in position
        )
        rows.append((local_label(y, m, z), members))
    rows.append((NORMALIZATION_LABEL, frozenset(range(len(cells)))))
    return ConstraintSystem(cells=cells, rows=tuple(rows))
