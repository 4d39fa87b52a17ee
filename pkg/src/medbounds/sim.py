"""Seeded ground-truth worlds and the containment/sharpness property suite.

Worlds are latent distributions with strictly positive rational weight on
every admissible cell of the generating assumption set.  Weights come from
a counter-based 64-bit generator (splitmix-style: golden-ratio increment,
two xor-multiply finalization rounds) so any world can be replayed from
its seed on any platform; raw draws are mapped to integers in [1, 2^64]
and normalized, which is an exact stand-in for a flat Dirichlet draw.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import catalog, model, oracle
from .catalog import BoundResult, UncatalogedError
from .model import Assumptions, Parameter
from .observed import ObservedDistribution

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(x: int) -> int:
    z = x & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def counter_stream(seed: int, index: int) -> int:
    """The index-th 64-bit draw of the stream with the given seed."""
    return _mix((seed + (index + 1) * _GOLDEN) & _MASK)


def sample_latent(assume: Assumptions, seed: int) -> dict:
    """Strictly positive normalized weights on the admissible cells."""
    cells = model.admissible_cells(assume)
    raw = [counter_stream(seed, idx) + 1 for idx in range(len(cells))]
    total = sum(raw)
    return {cell: Fraction(w, total) for cell, w in zip(cells, raw)}


def point_mass(cell, assume: Assumptions) -> dict:
    if not model.cell_admissible(cell, assume):
        raise ValueError(f"cell {cell} not admissible under {assume.label()}")
    return {cell: Fraction(1)}


def sample_sparse(assume: Assumptions, seed: int) -> dict:
    """A boundary world: random support subset, zero weight elsewhere.

    Each admissible cell is kept with probability one half (low bit of its
    draw); surviving cells get the remaining draw bits as weight.  Falls
    back to a point mass on the first admissible cell if the coin flips
    empty the support.
    """
    cells = model.admissible_cells(assume)
    raw = [counter_stream(seed, idx) for idx in range(len(cells))]
    weights = [(r >> 1) + 1 if r & 1 else 0 for r in raw]
    total = sum(weights)
    if total == 0:
        return {cells[0]: Fraction(1)}
    return {c: Fraction(w, total) for c, w in zip(cells, weights) if w}


def sample_point(assume: Assumptions, seed: int) -> dict:
    cells = model.admissible_cells(assume)
    return point_mass(cells[counter_stream(seed, 0) % len(cells)], assume)


def implied_observed(q: dict) -> ObservedDistribution:
    """Exact push-forward through the same incidence sets the LP uses."""
    cells = {}
    for y, m, a, z in model.POP_KEYS:
        members = model.cell_incidence(y, m, a, z)
        cells[model.pop_label(y, m, a, z)] = sum(
            (w for cell, w in q.items() if cell in members), Fraction(0)
        )
    return ObservedDistribution.from_cells(cells)


def true_value(q: dict, param: Parameter) -> Fraction:
    """Exact functional of the latent law; local = complier average."""
    if param.is_local:
        loc = Parameter({"lacme": "acme", "lnde": "nde", "late": "ate"}[param.kind], param.arm)
        contrast = model.objective(loc)
        mass = Fraction(0)
        total = Fraction(0)
        for cell, w in q.items():
            if cell[2] != 1:
                continue
            mass += w
            total += contrast.get(cell, 0) * w
        if mass == 0:
            raise ValueError("no complier mass; local parameter undefined")
        return total / mass
    contrast = model.objective(param)
    return sum((contrast.get(cell, 0) * w for cell, w in q.items()), Fraction(0))


_WORLD_KINDS = {
    "interior": sample_latent,
    "sparse": sample_sparse,
    "point": sample_point,
}


@dataclass(frozen=True)
class SimulatedWorld:
    assumptions: Assumptions
    seed: int
    latent: dict
    observed: ObservedDistribution
    kind: str = "interior"

    @classmethod
    def sample(cls, assume: Assumptions, seed: int, kind: str = "interior") -> "SimulatedWorld":
        q = _WORLD_KINDS[kind](assume, seed)
        return cls(assumptions=assume, seed=seed, latent=q,
                   observed=implied_observed(q), kind=kind)

    def truth(self, param: Parameter) -> Fraction:
        return true_value(self.latent, param)


@dataclass
class Violation:
    combo: str
    world: str
    parameter: str
    check: str
    detail: str
    latent: dict

    def describe(self) -> str:
        return f"{self.combo} {self.world} {self.parameter} {self.check}: {self.detail}"


@dataclass
class SuiteReport:
    worlds: int = 0
    checks: int = 0
    violations: list = field(default_factory=list)

    def record(self, ok: bool, violation: Violation | None):
        self.checks += 1
        if not ok and violation is not None:
            self.violations.append(violation)

    def describe(self) -> str:
        lines = [
            f"worlds evaluated: {self.worlds}",
            f"checks run: {self.checks}",
            f"violations: {len(self.violations)}",
        ]
        for v in self.violations:
            lines.append("  " + v.describe())
        return "\n".join(lines) + "\n"

    def machine(self) -> str:
        """JSON report; violations carry the full latent law for replay."""
        import json

        doc = {
            "worlds": self.worlds,
            "checks": self.checks,
            "violations": [
                {
                    "combination": v.combo,
                    "world": v.world,
                    "parameter": v.parameter,
                    "check": v.check,
                    "detail": v.detail,
                    "latent": {
                        f"{i}:{j}:{k}": str(w)
                        for (i, j, k), w in sorted(v.latent.items())
                    },
                }
                for v in self.violations
            ],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _interval_of(result: BoundResult):
    return result.lower, result.upper


def _params_for(assume: Assumptions) -> list[Parameter]:
    params = [Parameter(k, a) for k in ("acme", "nde") for a in (1, 0)]
    if assume.a4:
        params += [Parameter(k, a) for k in ("lacme", "lnde") for a in (1, 0)]
        params.append(Parameter("late"))
    return params


# One boundary world (sparse support, then a point mass) for every three
# random interiors, per the degenerate-coverage requirement.
_KIND_CYCLE = ("interior", "interior", "interior", "sparse", "point")


def run_property_suite(
    combos: Iterable[Assumptions], worlds_per_combo: int, seed: int
) -> SuiteReport:
    """Containment, sharpness, and nesting checks over sampled worlds.

    For each combo S and world sampled under S: the true parameter must lie
    in both the catalog and oracle intervals, the oracle interval must sit
    inside the catalog interval, the two must coincide when the stored
    forms are sharp (every cataloged combination with monotone compliance),
    and oracle intervals under S must contain oracle intervals under any
    cataloged superset of S for the same world.
    """
    report = SuiteReport()
    combos = list(combos)
    for combo_idx, assume in enumerate(combos):
        supersets = [s for s in combos if assume.issubset(s) and s != assume]
        for w in range(worlds_per_combo):
            world_seed = counter_stream(seed, combo_idx * worlds_per_combo + w)
            kind = _KIND_CYCLE[w % len(_KIND_CYCLE)]
            world = SimulatedWorld.sample(assume, world_seed, kind)
            report.worlds += 1
            wtag = f"world[seed={world_seed},kind={kind}]"
            for param in _params_for(assume):
                try:
                    truth = world.truth(param)
                except ValueError:
                    continue  # boundary world with no compliers: local undefined
                orc = oracle.oracle_bounds(world.observed, param, assume)
                if orc.status != "ok":
                    report.record(False, Violation(
                        assume.label(), wtag, param.name(), "oracle-feasible",
                        f"status {orc.status} on self-generated data", world.latent))
                    continue
                report.record(
                    orc.lower <= truth <= orc.upper,
                    Violation(assume.label(), wtag, param.name(), "truth-in-oracle",
                              f"truth {truth} outside [{orc.lower}, {orc.upper}]",
                              world.latent))
                try:
                    cat = catalog.evaluate(param, assume, world.observed)
                except UncatalogedError:
                    continue
                report.record(
                    cat.lower <= truth <= cat.upper,
                    Violation(assume.label(), wtag, param.name(), "truth-in-catalog",
                              f"truth {truth} outside [{cat.lower}, {cat.upper}]",
                              world.latent))
                report.record(
                    cat.lower <= orc.lower and orc.upper <= cat.upper,
                    Violation(assume.label(), wtag, param.name(), "oracle-in-catalog",
                              f"oracle [{orc.lower}, {orc.upper}] not within "
                              f"catalog [{cat.lower}, {cat.upper}]", world.latent))
                if assume.a4:
                    report.record(
                        cat.lower == orc.lower and cat.upper == orc.upper,
                        Violation(assume.label(), wtag, param.name(), "sharp-equality",
                                  f"catalog [{cat.lower}, {cat.upper}] != "
                                  f"oracle [{orc.lower}, {orc.upper}]", world.latent))
                for stronger in supersets:
                    if param.is_local and not stronger.a4:
                        continue
                    strong = oracle.oracle_bounds(world.observed, param, stronger)
                    if strong.status != "ok":
                        continue  # world need not be feasible under the superset
                    report.record(
                        orc.lower <= strong.lower and strong.upper <= orc.upper,
                        Violation(assume.label(), wtag, param.name(),
                                  f"nesting-{stronger.label()}",
                                  f"[{strong.lower}, {strong.upper}] under {stronger.label()} "
                                  f"not within [{orc.lower}, {orc.upper}]", world.latent))
    return report
