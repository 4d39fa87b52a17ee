"""Affine expressions in observed-cell probabilities.

A bound entry is an integer-coefficient affine functional of the observed
cells, written with labels like ``p101.1`` (population cells, read
y=1, m=0, a=1, arm z=1) or ``p10.1`` (complier cells, y=1, m=0, arm z=1),
plus an integer constant.  Expressions are kept in a canonical term order
(cells sorted by their (y, m[, a], z) key, constant last) so that textual
equality is expression equality.

Because each arm's cell probabilities sum to one, two different-looking
expressions can agree on every valid distribution.  ``normalized`` reduces
an expression modulo the per-arm normalization relations to a unique coset
representative, which is what set-level formula comparisons use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import model

_LABEL_RE = re.compile(r"^p([01])([01])([01])?\.([01])$")


def label_key(label: str) -> tuple[int, ...]:
    m = _LABEL_RE.match(label)
    if not m:
        raise ValueError(f"bad observed-cell label: {label!r}")
    y, mm, a, z = m.groups()
    if a is None:
        return (int(y), int(mm), int(z))
    return (int(y), int(mm), int(a), int(z))


def label_family(label: str) -> str:
    return "population" if len(label_key(label)) == 4 else "local"


@dataclass(frozen=True)
class Expr:
    """Canonical affine expression: ordered nonzero terms plus a constant."""

    terms: tuple[tuple[str, int], ...]
    const: int = 0

    @classmethod
    def make(cls, coef: Mapping[str, int], const: int = 0) -> "Expr":
        terms = tuple(
            (label, int(c))
            for label, c in sorted(coef.items(), key=lambda kv: label_key(kv[0]))
            if c != 0
        )
        return cls(terms=terms, const=int(const))

    def coef(self) -> dict[str, int]:
        return dict(self.terms)

    def evaluate(self, cells: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(self.const)
        for label, c in self.terms:
            total += c * Fraction(cells[label])
        return total

    def __neg__(self) -> "Expr":
        return Expr.make({l: -c for l, c in self.terms}, -self.const)

    def __sub__(self, other: "Expr") -> "Expr":
        coef = dict(self.terms)
        for l, c in other.terms:
            coef[l] = coef.get(l, 0) - c
        return Expr.make(coef, self.const - other.const)

    def scaled(self, f: int) -> "Expr":
        return Expr.make({l: f * c for l, c in self.terms}, f * self.const)

    def render(self) -> str:
        if not self.terms and self.const == 0:
            return "0"
        parts: list[str] = []
        for label, c in self.terms:
            mag = abs(c)
            body = label if mag == 1 else f"{mag}{label}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {body}")
        if self.const:
            sign = "+" if self.const > 0 else "-"
            if parts:
                parts.append(f"{sign} {abs(self.const)}")
            else:
                parts.append(str(self.const))
        return " ".join(parts)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.render()


_TERM_RE = re.compile(r"([+-]?)\s*(\d*)\s*(p[01]+\.[01])|([+-]?)\s*(\d+)")


def parse_expr(text: str) -> Expr:
    """Parse a rendered expression like ``-p001.1 - p011.1 + 1``."""
    coef: dict[str, int] = {}
    const = 0
    pos = 0
    text = text.strip()
    if text == "0":
        return Expr.make({})
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse expression at {text[pos:]!r}")
        if m.group(3):
            sign = -1 if m.group(1) == "-" else 1
            mag = int(m.group(2)) if m.group(2) else 1
            label = m.group(3)
            label_key(label)  # validates
            coef[label] = coef.get(label, 0) + sign * mag
        else:
            sign = -1 if m.group(4) == "-" else 1
            const += sign * int(m.group(5))
        pos = m.end()
        while pos < len(text) and text[pos] in " \t":
            pos += 1
    return Expr.make(coef, const)


def _arm_relations(family: str) -> tuple[Expr, Expr]:
    """For each arm z, (sum of that arm's cells) - 1, which vanishes on valid data."""
    if family == "population":
        labels = model.POP_LABELS
    elif family == "local":
        labels = model.LOCAL_LABELS
    else:
        raise ValueError(f"unknown family: {family!r}")
    rel = []
    for z in (0, 1):
        members = {l: 1 for l in labels if label_key(l)[-1] == z}
        rel.append(Expr.make(members, -1))
    return rel[0], rel[1]


def normalized(expr: Expr, family: str) -> Expr:
    """Unique representative of ``expr`` modulo the per-arm sum-to-one relations.

    The reduction zeroes the coefficient of the lexicographically last cell
    of each arm (``p111.z`` / ``p11.z``), so equality of normalized forms is
    equality as functionals on valid distributions.
    """
    rel0, rel1 = _arm_relations(family)
    out = expr
    for rel in (rel1, rel0):
        pivot = rel.terms[-1][0]  # last cell of the arm
        c = out.coef().get(pivot, 0)
        if c:
            out = out - rel.scaled(c)
    return out


def exprs_equal(a: Expr, b: Expr, family: str) -> bool:
    return normalized(a, family) == normalized(b, family)


@dataclass(frozen=True)
class SymbolicBound:
    """One side of a bound: lower entries compose by max, upper by min."""

    direction: str  # "lower" | "upper"
    entries: tuple[Expr, ...]

    def __post_init__(self):
        if self.direction not in ("lower", "upper"):
            raise ValueError(f"bad direction: {self.direction!r}")

    def evaluate(self, cells: Mapping[str, Fraction]) -> tuple[Fraction, Expr]:
        """Value and the entry attaining it (first in canonical order on ties)."""
        if not self.entries:
            raise ValueError("no entries to evaluate")
        pick = max if self.direction == "lower" else min
        best = None
        best_entry = None
        for entry in self.entries:
            v = entry.evaluate(cells)
            if best is None or pick(best, v) == v and v != best:
                best, best_entry = v, entry
        return best, best_entry

    def normalized_set(self, family: str) -> frozenset[Expr]:
        return frozenset(normalized(e, family) for e in self.entries)


def entry_sets_equal(a: Iterable[Expr], b: Iterable[Expr], family: str) -> bool:
    return {normalized(e, family) for e in a} == {normalized(e, family) for e in b}
