#!/usr/bin/env python3
"""Rebuild and check the bundled JOBS II contingency table.

The fixture in data/jobs2_counts.csv is a 16-cell cross-tabulation of the
Job Search Intervention Study (JOBS II) public dataset, the complete-case
subset of 899 respondents distributed as ``jobs`` with the R mediation
package.  Variable mapping:

    z = treat     randomized assignment to the job-search workshop
    a = comply    actual workshop attendance; 0 for every control
                  subject, so the z=0, a=1 cells are structurally empty
    m = job_dich  job-search self-efficacy, dichotomized as shipped in
                  the source file (1 = high efficacy); the cut point is
                  whatever the distributors used, and the margin check
                  below pins the resulting split
    y = work1     re-employment at follow-up (1 = working)

This script does not download anything: the cross-tabulation is embedded
below exactly as obtained from that mapping, and the script re-derives
the CSV from it, checking the published margins on the way:

    899 respondents in total
    600 assigned to treatment, 299 to control
    372 attended among the assigned, 228 did not
    555 with high dichotomized self-efficacy

Run from anywhere; the CSV lands next to the repository's data/ dir.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

# (z, a, m, y) -> count
CELLS = {
    (0, 0, 0, 0): 98,
    (0, 0, 0, 1): 32,
    (0, 0, 1, 0): 115,
    (0, 0, 1, 1): 54,
    (0, 1, 0, 0): 0,
    (0, 1, 0, 1): 0,
    (0, 1, 1, 0): 0,
    (0, 1, 1, 1): 0,
    (1, 0, 0, 0): 58,
    (1, 0, 0, 1): 32,
    (1, 0, 1, 0): 86,
    (1, 0, 1, 1): 52,
    (1, 1, 0, 0): 86,
    (1, 1, 0, 1): 38,
    (1, 1, 1, 0): 163,
    (1, 1, 1, 1): 85,
}

MARGIN_CHECKS = [
    ("total respondents", lambda c: sum(c.values()), 899),
    ("assigned to treatment", lambda c: sum(v for (z, a, m, y), v in c.items() if z == 1), 600),
    ("assigned to control", lambda c: sum(v for (z, a, m, y), v in c.items() if z == 0), 299),
    ("attended | assigned", lambda c: sum(v for (z, a, m, y), v in c.items() if z == 1 and a == 1), 372),
    ("no-show | assigned", lambda c: sum(v for (z, a, m, y), v in c.items() if z == 1 and a == 0), 228),
    ("high self-efficacy", lambda c: sum(v for (z, a, m, y), v in c.items() if m == 1), 555),
    ("control attendance", lambda c: sum(v for (z, a, m, y), v in c.items() if z == 0 and a == 1), 0),
]


def main() -> int:
    ok = True
    for name, fn, want in MARGIN_CHECKS:
        got = fn(CELLS)
        status = "ok" if got == want else "MISMATCH"
        if got != want:
            ok = False
        print(f"  {name:24s} {got:4d} (expected {want}) {status}")
    if not ok:
        print("margin checks failed; not writing the fixture", file=sys.stderr)
        return 1

    out = Path(__file__).resolve().parent.parent / "data" / "jobs2_counts.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["z", "a", "m", "y", "count"])
        for key in sorted(CELLS):
            writer.writerow(list(key) + [CELLS[key]])
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
