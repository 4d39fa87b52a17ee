"""Observed-cell distributions and complier-stratum identification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import model


class IdentificationError(ValueError):
    """Raised when the compliance margin gives the local system no footing."""


@dataclass(frozen=True)
class ObservedDistribution:
    """P(Y=y, M=m, A=a | Z=z) for all 16 cells, exact rationals.

    ``p`` is ordered by model.POP_KEYS.  Each arm must sum to one.
    """

    p: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.p) != 16:
            raise ValueError("need 16 observed cells")
        for z in (0, 1):
            arm = sum(
                (v for key, v in zip(model.POP_KEYS, self.p) if key[3] == z),
                Fraction(0),
            )
            if arm != 1:
                raise ValueError(f"arm z={z} cells sum to {arm}, not 1")
        if any(v < 0 or v > 1 for v in self.p):
            raise ValueError("cell probabilities must lie in [0, 1]")

    @classmethod
    def from_cells(cls, cells: Mapping[str, Fraction | int]) -> "ObservedDistribution":
        return cls(
            p=tuple(Fraction(cells.get(label, 0)) for label in model.POP_LABELS)
        )

    def cell(self, y: int, m: int, a: int, z: int) -> Fraction:
        return self.p[model.POP_KEYS.index((y, m, a, z))]

    def cells(self) -> dict[str, Fraction]:
        return dict(zip(model.POP_LABELS, self.p))

    def uptake_rate(self, z: int) -> Fraction:
        """P(A=1 | Z=z)."""
        return sum(
            (v for key, v in zip(model.POP_KEYS, self.p) if key[2] == 1 and key[3] == z),
            Fraction(0),
        )

    def outcome_rate(self, z: int) -> Fraction:
        """P(Y=1 | Z=z)."""
        return sum(
            (v for key, v in zip(model.POP_KEYS, self.p) if key[0] == 1 and key[3] == z),
            Fraction(0),
        )

    def compliance_margin(self) -> Fraction:
        """P(A=1 | Z=1) - P(A=1 | Z=0), the share of compliers when a4 holds."""
        return self.uptake_rate(1) - self.uptake_rate(0)


@dataclass(frozen=True)
class LocalObservedDistribution:
    """Identified complier cells P(Y=y, M=m | Z=z, complier), plus the complier share.

    Cells are ordered by model.LOCAL_KEYS.  Each arm sums to one by
    construction; individual cells can fall outside [0, 1] when the data
    contradict monotone compliance, which ``is_proper`` reports.
    """

    p: tuple[Fraction, ...]
    delta: Fraction

    def __post_init__(self):
        if len(self.p) != 8:
            raise ValueError("need 8 complier cells")
        if not 0 < self.delta <= 1:
            raise IdentificationError(f"complier share {self.delta} outside (0, 1]")
        for z in (0, 1):
            arm = sum(
                (v for key, v in zip(model.LOCAL_KEYS, self.p) if key[2] == z),
                Fraction(0),
            )
            if arm != 1:
                raise ValueError(f"complier arm z={z} sums to {arm}, not 1")

    @classmethod
    def from_cells(
        cls, cells: Mapping[str, Fraction | int], delta: Fraction | int = 1
    ) -> "LocalObservedDistribution":
        return cls(
            p=tuple(Fraction(cells.get(label, 0)) for label in model.LOCAL_LABELS),
            delta=Fraction(delta),
        )

    def cell(self, y: int, m: int, z: int) -> Fraction:
        return self.p[model.LOCAL_KEYS.index((y, m, z))]

    def cells(self) -> dict[str, Fraction]:
        return dict(zip(model.LOCAL_LABELS, self.p))

    @property
    def is_proper(self) -> bool:
        return all(0 <= v <= 1 for v in self.p)


def local_distribution(observed: ObservedDistribution) -> LocalObservedDistribution:
    """Identify the complier cells by per-arm differencing.

    Under monotone compliance the treated-and-assigned cell mass splits into
    always-takers (present in both arms) and compliers, so the z=1 complier
    cells are the excess of (Y, M, A=1) cells in arm 1 over arm 0, and the
    z=0 cells the excess of (Y, M, A=0) cells in arm 0 over arm 1, each
    scaled by the complier share.  Negative cells mean the data contradict
    the assumption; they are preserved so diagnostics can report them.
    """
    delta = observed.compliance_margin()
    if delta <= 0:
        raise IdentificationError(
            f"compliance margin {delta} is not positive; no identified complier stratum"
        )
    cells = {}
    for y, m, z in model.LOCAL_KEYS:
        if z == 1:
            diff = observed.cell(y, m, 1, 1) - observed.cell(y, m, 1, 0)
        else:
            diff = observed.cell(y, m, 0, 0) - observed.cell(y, m, 0, 1)
        cells[model.local_label(y, m, z)] = diff / delta
    return LocalObservedDistribution.from_cells(cells, delta)


def late(observed: ObservedDistribution) -> Fraction:
    """Complier average effect of treatment on outcome, point identified."""
    delta = observed.compliance_margin()
    if delta <= 0:
        raise IdentificationError(
            f"compliance margin {delta} is not positive; late is not identified"
        )
    return (observed.outcome_rate(1) - observed.outcome_rate(0)) / delta
