#!/usr/bin/env python3
"""Evaluate every cataloged bound on the bundled JOBS II fixture.

Prints one grid for the population parameters and one for the complier
parameters, cataloged closed forms and LP oracle side by side, then
lists any parameter/combination pairs where the two methods disagree.
On this dataset the two agree everywhere; the disagreement report is
the interesting output on other data (see README on catalog caveats).
"""

from __future__ import annotations

import sys
from pathlib import Path

from medbounds import cataloged_combinations, estimate, evaluate, oracle_bounds, parse_table
from medbounds.dataio import render_table, result_sort_key
from medbounds.model import Parameter

FIXTURE = Path(__file__).resolve().parent.parent / "data" / "jobs2_counts.csv"


def main() -> int:
    observed = estimate(parse_table(FIXTURE.read_text()))

    results = []
    disagreements = []
    for family, kinds in (
        ("population", ("acme", "nde")),
        ("local", ("lacme", "lnde")),
    ):
        params = [Parameter(k, a) for k in kinds for a in (1, 0)]
        if family == "local":
            params.append(Parameter("late"))
        for assume in cataloged_combinations(family):
            for param in params:
                cat = evaluate(param, assume, observed)
                orc = oracle_bounds(observed, param, assume)
                results.extend([cat, orc])
                if (cat.lower, cat.upper) != (orc.lower, orc.upper):
                    disagreements.append(
                        f"{param.name()} under {assume.label()}: catalog "
                        f"[{cat.lower}, {cat.upper}] vs oracle [{orc.lower}, {orc.upper}]"
                    )

    results.sort(key=result_sort_key)
    pop = [r for r in results if not r.parameter.is_local]
    loc = [r for r in results if r.parameter.is_local]
    print("population parameters")
    print(render_table(pop))
    print("complier parameters")
    print(render_table(loc))
    if disagreements:
        print("catalog/oracle disagreements:")
        for line in disagreements:
            print("  " + line)
        return 1
    print("catalog and oracle agree on every cell of this dataset")
    return 0


if __name__ == "__main__":
    sys.exit(main())
