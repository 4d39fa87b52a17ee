"""Command-line front door.

Four subcommands: ``bounds`` evaluates intervals from a contingency
table, ``derive`` regenerates a closed-form bound symbolically,
``simulate`` runs the seeded property suite, and ``validate`` checks a
table's compatibility with assumption sets.

Exit codes: 0 success; 2 parse or configuration error; 3 an analytic
finding (infeasible data, crossed bounds, or a failed cross-method
self-check) with the report still emitted; 4 a combination was requested
from the catalog that has no stored closed form.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog, dataio, dual, model, sim
from .catalog import UncatalogedError
from .dataio import ParseError
from .model import Assumptions, Parameter
from .observed import IdentificationError
from .oracle import oracle_bounds

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FINDING = 3
EXIT_UNCATALOGED = 4

# Short flag and descriptive alias for each assumption, in display order.
_FLAGS = (
    ("a4", "monotone-compliance"),
    ("a5", "monotone-mediator"),
    ("a6", "monotone-outcome-mediator"),
    ("a7", "monotone-outcome-treatment"),
)


def _add_assumption_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("assumptions")
    for short, alias in _FLAGS:
        group.add_argument(
            f"--{short}", f"--{alias}", dest=short, action="store_true",
            help=f"impose assumption {short} ({alias.replace('-', ' ')})",
        )
    group.add_argument(
        "--assume", action="append", metavar="COMBO",
        help='an assumption combination such as "a4+a5" or "none"; '
             "repeatable to evaluate several combinations in one run",
    )


def _combos(args: argparse.Namespace) -> list[Assumptions]:
    """Requested combinations: every --assume plus the one built from flags."""
    combos: list[Assumptions] = []
    for text in args.assume or ():
        combos.append(Assumptions.parse(text))
    flagged = [short for short, _ in _FLAGS if getattr(args, short)]
    if flagged or not combos:
        combos.append(Assumptions.from_flags(flagged))
    unique: list[Assumptions] = []
    for a in combos:
        if a not in unique:
            unique.append(a)
    return unique


def _single_combo(args: argparse.Namespace) -> Assumptions:
    combos = _combos(args)
    if len(combos) != 1:
        raise ParseError("this subcommand takes exactly one assumption combination")
    return combos[0]


def _default_params(assume: Assumptions) -> list[Parameter]:
    params = [Parameter(k, a) for k in ("acme", "nde") for a in (1, 0)]
    if assume.a4:
        params += [Parameter(k, a) for k in ("lacme", "lnde") for a in (1, 0)]
        params.append(Parameter("late"))
    return params


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_observed(path: str):
    counts = dataio.parse_table(_read_input(path))
    return dataio.estimate(counts)


def _cmd_bounds(args: argparse.Namespace) -> int:
    observed = _load_observed(args.input)
    combos = _combos(args)
    params_requested = [Parameter.parse(t) for t in args.param or ()]
    for p in params_requested:
        for assume in combos:
            if p.is_local and not assume.a4:
                raise ParseError(
                    f"local parameter {p.name()} needs monotone compliance; "
                    f"add a4 to combination {assume.label()!r}"
                )

    methods = ("catalog", "oracle") if args.method == "both" else (args.method,)
    results = []
    finding = False
    notes: list[str] = []
    pairs = {}
    for assume in combos:
        params = params_requested or _default_params(assume)
        for param in params:
            row = {}
            for method in methods:
                try:
                    if method == "catalog":
                        res = catalog.evaluate(param, assume, observed)
                    else:
                        res = oracle_bounds(observed, param, assume)
                except UncatalogedError as exc:
                    print(f"error: {exc}", file=sys.stderr)
                    return EXIT_UNCATALOGED
                except IdentificationError as exc:
                    notes.append(f"{param.name()} under {assume.label()}: {exc}")
                    finding = True
                    row = {}
                    break
                results.append(res)
                row[method] = res
                if res.status != "ok":
                    finding = True
            if len(row) == 2:
                pairs[(param, assume)] = (row["catalog"], row["oracle"])

    if args.method == "both":
        for (param, assume), (cat, orc) in sorted(
            pairs.items(), key=lambda kv: dataio.result_sort_key(kv[1][0])
        ):
            if cat.status != "ok" or orc.status != "ok":
                continue
            if not (cat.lower <= orc.lower and orc.upper <= cat.upper):
                notes.append(
                    f"self-check failed: oracle interval for {param.name()} under "
                    f"{assume.label()} is not inside the catalog interval "
                    f"(catalog [{cat.lower}, {cat.upper}], oracle [{orc.lower}, {orc.upper}])"
                )
                finding = True
            elif assume.a4 and (cat.lower, cat.upper) != (orc.lower, orc.upper):
                notes.append(
                    f"self-check failed: catalog and oracle disagree for {param.name()} "
                    f"under {assume.label()} where the stored form should be exact "
                    f"(catalog [{cat.lower}, {cat.upper}], oracle [{orc.lower}, {orc.upper}])"
                )
                finding = True

    results.sort(key=dataio.result_sort_key)
    out = dataio.render_machine(results) if args.output == "machine" else dataio.render_table(results)
    print(out, end="" if out.endswith("\n") else "\n")
    for note in notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_FINDING if finding else EXIT_OK


def _cmd_derive(args: argparse.Namespace) -> int:
    assume = _single_combo(args)
    param = Parameter.parse(args.param)
    if param.is_local and not assume.a4:
        raise ParseError(
            f"local parameter {param.name()} needs monotone compliance; add a4"
        )
    directions = ("lower", "upper") if args.direction == "both" else (args.direction,)
    sides = []
    for direction in directions:
        bound = dual.derive_bound(param, assume, direction)
        if args.minimal:
            bound = dual.minimal_entries(bound, param, assume)
        sides.append((direction, bound))

    if args.output == "machine":
        doc = {
            "parameter": param.name(),
            "assumptions": assume.label(),
            "minimal": bool(args.minimal),
            "sides": [
                {
                    "direction": direction,
                    "combiner": "max" if direction == "lower" else "min",
                    "entries": [
                        {
                            "text": entry.render(),
                            "constant": entry.const,
                            "coefficients": dict(entry.coef()),
                        }
                        for entry in bound.entries
                    ],
                }
                for direction, bound in sides
            ],
        }
        print(json.dumps(doc, indent=1, sort_keys=True))
    else:
        tag = " (minimal)" if args.minimal else ""
        print(f"{param.name()} under {assume.label()}{tag}")
        for direction, bound in sides:
            word = "max" if direction == "lower" else "min"
            print(f"  {direction} = {word} of:")
            for entry in bound.entries:
                print(f"    {entry.render()}")
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.assume or any(getattr(args, s) for s, _ in _FLAGS):
        combos = _combos(args)
    else:
        combos = catalog.cataloged_combinations("population")
    report = sim.run_property_suite(combos, args.worlds, args.seed)
    out = report.machine() if args.output == "machine" else report.describe()
    print(out, end="" if out.endswith("\n") else "\n")
    return EXIT_FINDING if report.violations else EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    observed = _load_observed(args.input)
    if args.assume or any(getattr(args, s) for s, _ in _FLAGS):
        combos = _combos(args)
    else:
        combos = catalog.cataloged_combinations("population")
    reports = [dataio.check_feasibility(observed, assume) for assume in combos]
    if args.output == "machine":
        doc = [
            {
                "assumptions": r.assumptions.label(),
                "feasible": r.feasible,
                "margin": None if r.margin is None else str(r.margin),
                "margin_ok": r.margin_ok,
            }
            for r in reports
        ]
        print(json.dumps(doc, indent=1, sort_keys=True))
    else:
        for r in reports:
            print(r.describe())
    return EXIT_FINDING if any(not r.feasible for r in reports) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medbounds",
        description="Nonparametric bounds on mediated and direct effects "
                    "in randomized experiments with noncompliance.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_bounds = sub.add_parser(
        "bounds", help="evaluate bound intervals from a contingency table"
    )
    p_bounds.add_argument("input", help="CSV path (z,a,m,y[,count]) or - for stdin")
    _add_assumption_flags(p_bounds)
    p_bounds.add_argument(
        "--param", action="append", metavar="NAME",
        help='parameter such as "acme(1)", "nde(0)", "lacme(1)", "late"; '
             "repeatable; default covers every parameter the combination supports",
    )
    p_bounds.add_argument(
        "--method", choices=("catalog", "oracle", "both"), default="oracle",
        help="closed-form catalog, exact LP oracle, or both with a "
             "containment/equality self-check (default: oracle)",
    )
    p_bounds.add_argument(
        "--output", choices=("table", "machine"), default="table",
        help="human-readable grid or deterministic JSON (default: table)",
    )
    p_bounds.set_defaults(func=_cmd_bounds)

    p_derive = sub.add_parser(
        "derive", help="derive a closed-form bound by vertex enumeration"
    )
    _add_assumption_flags(p_derive)
    p_derive.add_argument("--param", required=True, metavar="NAME")
    p_derive.add_argument(
        "--direction", choices=("lower", "upper", "both"), default="both"
    )
    p_derive.add_argument(
        "--minimal", action="store_true",
        help="drop entries that are never active on the feasible set "
             "(one exact LP per entry; slower)",
    )
    p_derive.add_argument(
        "--output", choices=("table", "machine"), default="table"
    )
    p_derive.set_defaults(func=_cmd_derive)

    p_sim = sub.add_parser(
        "simulate", help="run the containment/sharpness property suite"
    )
    _add_assumption_flags(p_sim)
    p_sim.add_argument("--worlds", type=int, default=20, metavar="N",
                       help="worlds per combination (default: 20)")
    p_sim.add_argument("--seed", type=int, default=0, metavar="S",
                       help="64-bit stream seed (default: 0)")
    p_sim.add_argument("--output", choices=("table", "machine"), default="table")
    p_sim.set_defaults(func=_cmd_simulate)

    p_val = sub.add_parser(
        "validate", help="check a table against assumption sets"
    )
    p_val.add_argument("input", help="CSV path (z,a,m,y[,count]) or - for stdin")
    _add_assumption_flags(p_val)
    p_val.add_argument("--output", choices=("table", "machine"), default="table")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
