"""Count ingestion, plug-in cell estimation, diagnostics, and rendering.

Two input layouts are accepted: aggregated rows ``z,a,m,y,count`` and
subject-level rows ``z,a,m,y`` (one per observation).  Estimation is the
plug-in rule n / arm-total in exact rationals, so downstream results are
bit-reproducible.  Rendering offers a human table (3-decimal, half away
from zero, applied only at render time) and a machine document that
round-trips exact values.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction

from . import model, oracle
from .catalog import BoundResult
from .model import Assumptions, Parameter
from .observed import ObservedDistribution


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class CountTable:
    """Cell counts n[y][m][a][z] ordered by model.POP_KEYS."""

    n: tuple[int, ...]

    def __post_init__(self):
        if len(self.n) != 16:
            raise ValueError("need 16 cell counts")
        if any(v < 0 for v in self.n):
            raise ValueError("counts must be nonnegative")
        for z in (0, 1):
            if self.arm_total(z) == 0:
                raise ParseError(f"arm z={z} has no observations")

    def cell(self, y: int, m: int, a: int, z: int) -> int:
        return self.n[model.POP_KEYS.index((y, m, a, z))]

    def arm_total(self, z: int) -> int:
        return sum(v for key, v in zip(model.POP_KEYS, self.n) if key[3] == z)

    @classmethod
    def from_mapping(cls, counts) -> "CountTable":
        return cls(n=tuple(int(counts.get(key, 0)) for key in model.POP_KEYS))


def _read_rows(text: str, expected_header: tuple[str, ...]):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty document") from None
    header = tuple(h.strip().lower() for h in header)
    if header != expected_header:
        raise ParseError(
            f"expected header {','.join(expected_header)}, got {','.join(header)}"
        )
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != len(expected_header):
            raise ParseError(f"line {lineno}: expected {len(expected_header)} fields")
        yield lineno, [f.strip() for f in row]


def _binary(field: str, lineno: int, name: str) -> int:
    if field not in ("0", "1"):
        raise ParseError(f"line {lineno}: {name} must be 0 or 1, got {field!r}")
    return int(field)


def parse_counts(text: str) -> CountTable:
    """Aggregated layout ``z,a,m,y,count``; omitted cells are zero."""
    counts = {}
    for lineno, (zf, af, mf, yf, cf) in _read_rows(text, ("z", "a", "m", "y", "count")):
        key = (
            _binary(yf, lineno, "y"),
            _binary(mf, lineno, "m"),
            _binary(af, lineno, "a"),
            _binary(zf, lineno, "z"),
        )
        try:
            count = int(cf)
        except ValueError:
            raise ParseError(f"line {lineno}: count must be an integer") from None
        if count < 0:
            raise ParseError(f"line {lineno}: count must be nonnegative")
        if key in counts:
            y, m, a, z = key
            raise ParseError(f"line {lineno}: duplicate cell z={z},a={a},m={m},y={y}")
        counts[key] = count
    return CountTable.from_mapping(counts)


def parse_long(text: str) -> CountTable:
    """Subject-level layout ``z,a,m,y``, one row per observation."""
    counts = {}
    for lineno, (zf, af, mf, yf) in _read_rows(text, ("z", "a", "m", "y")):
        key = (
            _binary(yf, lineno, "y"),
            _binary(mf, lineno, "m"),
            _binary(af, lineno, "a"),
            _binary(zf, lineno, "z"),
        )
        counts[key] = counts.get(key, 0) + 1
    return CountTable.from_mapping(counts)


def parse_table(text: str) -> CountTable:
    """Dispatch on the header: 5 columns aggregated, 4 subject-level."""
    first = text.splitlines()[0] if text.splitlines() else ""
    ncols = len(first.split(","))
    if ncols == 5:
        return parse_counts(text)
    if ncols == 4:
        return parse_long(text)
    raise ParseError("unrecognized header; use z,a,m,y,count or z,a,m,y")


def estimate(counts: CountTable) -> ObservedDistribution:
    cells = {}
    for key in model.POP_KEYS:
        y, m, a, z = key
        cells[model.pop_label(y, m, a, z)] = Fraction(
            counts.cell(y, m, a, z), counts.arm_total(z)
        )
    return ObservedDistribution.from_cells(cells)


@dataclass(frozen=True)
class FeasibilityReport:
    assumptions: Assumptions
    feasible: bool
    margin: Fraction
    margin_ok: bool | None  # direct uptake-margin check; None when a4 not assumed

    def describe(self) -> str:
        verdict = "feasible" if self.feasible else "infeasible"
        line = f"assumptions {self.assumptions.label()}: {verdict}"
        if self.margin_ok is not None:
            line += (
                f" (uptake margin {render_decimal(self.margin)} "
                f"{'consistent with' if self.margin_ok else 'contradicts'} monotone compliance)"
            )
        return line


def check_feasibility(
    observed: ObservedDistribution, assume: Assumptions
) -> FeasibilityReport:
    """LP probe plus, under monotone compliance, the direct margin check."""
    probe = oracle.feasibility(observed, assume)
    margin = observed.compliance_margin()
    margin_ok = (margin >= 0) if assume.a4 else None
    return FeasibilityReport(
        assumptions=assume,
        feasible=probe.status == "optimal",
        margin=margin,
        margin_ok=margin_ok,
    )


def render_decimal(x: Fraction, places: int = 3) -> str:
    """Fixed-point text, round half away from zero."""
    scale = 10**places
    q = x * scale
    whole, rem = divmod(abs(q.numerator), q.denominator)
    if 2 * rem >= q.denominator:
        whole += 1
    sign = "-" if q.numerator < 0 and whole else ""
    return f"{sign}{whole // scale}.{whole % scale:0{places}d}"


_KIND_ORDER = {k: i for i, k in enumerate(("acme", "nde", "ate", "lacme", "lnde", "late"))}


def result_sort_key(r: BoundResult):
    """Parameters in table order (arm 1 before arm 0), then combinations."""
    arm = r.parameter.arm if r.parameter.arm is not None else -1
    return (_KIND_ORDER[r.parameter.kind], -arm, len(r.assumptions.flags()), r.assumptions.flags(), r.method)


def _interval_text(r: BoundResult) -> str:
    if r.lower is None:
        return "infeasible"
    text = f"[{render_decimal(r.lower)}, {render_decimal(r.upper)}]"
    if r.status != "ok":
        text += f" ({r.status})"
    return text


def render_table(results: list[BoundResult]) -> str:
    """Rows = parameters, columns = assumption combinations."""
    results = sorted(results, key=result_sort_key)
    combos = []
    params = []
    for r in results:
        label = r.assumptions.label()
        if label not in combos:
            combos.append(label)
        name = r.parameter.name()
        if name not in params:
            params.append(name)
    methods = sorted({r.method for r in results})
    split_methods = len(methods) > 1
    grid = {}
    for r in results:
        key = (r.parameter.name(), r.assumptions.label(), r.method)
        grid[key] = _interval_text(r)
    header = ["parameter"] + combos
    lines = []
    rows = []
    for name in params:
        for method in methods:
            cells = [grid.get((name, combo, method), "") for combo in combos]
            if not any(cells):
                continue
            label = f"{name} ({method})" if split_methods else name
            rows.append([label] + cells)
    widths = [max(len(row[i]) for row in rows + [header]) for i in range(len(header))]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _result_record(r: BoundResult) -> dict:
    return {
        "parameter": r.parameter.kind,
        "arm": r.parameter.arm,
        "assumptions": list(r.assumptions.flags()),
        "method": r.method,
        "lower": None if r.lower is None else str(r.lower),
        "upper": None if r.upper is None else str(r.upper),
        "lower_3dp": None if r.lower is None else render_decimal(r.lower),
        "upper_3dp": None if r.upper is None else render_decimal(r.upper),
        "status": r.status,
        "active_lower_entry": None if r.active_lower is None else r.active_lower.render(),
        "active_upper_entry": None if r.active_upper is None else r.active_upper.render(),
    }


def render_machine(results: list[BoundResult]) -> str:
    records = [_result_record(r) for r in sorted(results, key=result_sort_key)]
    return json.dumps({"results": records}, indent=1, sort_keys=True) + "\n"


def parse_machine(text: str) -> list[dict]:
    """Read a machine document back with exact rational endpoints."""
    payload = json.loads(text)
    out = []
    for rec in payload["results"]:
        rec = dict(rec)
        for field in ("lower", "upper"):
            if rec[field] is not None:
                rec[field] = Fraction(rec[field])
        out.append(rec)
    return out
