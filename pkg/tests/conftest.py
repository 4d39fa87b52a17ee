from __future__ import annotations

from pathlib import Path

import pytest

from medbounds import cataloged_combinations, estimate, parse_table

ROOT = Path(__file__).resolve().parent.parent

# A compact dataset (177 subjects, two-sided noncompliance) on which the
# stored closed forms for acme(0) demonstrably clip the exact LP interval.
# Kept verbatim so the cross-method self-check has a deterministic trigger.
DEFECT_COUNTS = """\
z,a,m,y,count
0,0,0,0,29
0,0,0,1,32
0,0,1,0,31
0,0,1,1,26
0,1,0,0,14
0,1,0,1,16
0,1,1,0,16
0,1,1,1,13
1,0,0,0,18
1,0,0,1,16
1,0,1,0,18
1,0,1,1,10
1,1,0,0,30
1,1,0,1,29
1,1,1,0,29
1,1,1,1,27
"""

# Uptake drops from 1/2 to 1/4 between arms: contradicts monotone compliance.
REVERSED_COUNTS = """\
z,a,m,y,count
0,0,0,0,10
0,0,0,1,10
0,0,1,0,10
0,0,1,1,10
0,1,0,0,20
0,1,0,1,20
0,1,1,0,10
0,1,1,1,10
1,0,0,0,25
1,0,0,1,25
1,0,1,0,20
1,0,1,1,20
1,1,0,0,5
1,1,0,1,2
1,1,1,0,2
1,1,1,1,1
"""


@pytest.fixture(scope="session")
def jobs_path() -> Path:
    return ROOT / "data" / "jobs2_counts.csv"


@pytest.fixture(scope="session")
def jobs_observed(jobs_path):
    return estimate(parse_table(jobs_path.read_text()))


@pytest.fixture(scope="session")
def defect_observed():
    return estimate(parse_table(DEFECT_COUNTS))


@pytest.fixture(scope="session")
def reversed_observed():
    return estimate(parse_table(REVERSED_COUNTS))


@pytest.fixture(scope="session")
def population_combos():
    return cataloged_combinations("population")


@pytest.fixture(scope="session")
def local_combos():
    return cataloged_combinations("local")
