"""Ingestion, estimation, rendering, and the machine round trip."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medbounds import model
from medbounds.catalog import BoundResult, evaluate
from medbounds.dataio import (
    CountTable,
    ParseError,
    check_feasibility,
    estimate,
    parse_counts,
    parse_long,
    parse_machine,
    parse_table,
    render_decimal,
    render_machine,
    render_table,
    result_sort_key,
)
from medbounds.model import Assumptions, Parameter
from medbounds.oracle import oracle_bounds


def _counts_text(counts: dict) -> str:
    lines = ["z,a,m,y,count"]
    for (y, m, a, z), c in sorted(counts.items(), key=lambda kv: (kv[0][3], kv[0][2], kv[0][1], kv[0][0])):
        lines.append(f"{z},{a},{m},{y},{c}")
    return "\n".join(lines) + "\n"


def _long_text(counts: dict) -> str:
    lines = ["z,a,m,y"]
    for (y, m, a, z), c in sorted(counts.items()):
        lines.extend([f"{z},{a},{m},{y}"] * c)
    return "\n".join(lines) + "\n"


counts_strategy = st.fixed_dictionaries(
    {key: st.integers(0, 5) for key in model.POP_KEYS}
).filter(
    lambda c: sum(v for k, v in c.items() if k[3] == 0) > 0
    and sum(v for k, v in c.items() if k[3] == 1) > 0
)


@settings(max_examples=30, deadline=None)
@given(counts_strategy)
def test_aggregated_and_subject_level_agree(counts):
    assert parse_counts(_counts_text(counts)) == parse_long(_long_text(counts))
    assert parse_table(_counts_text(counts)) == parse_table(_long_text(counts))


@settings(max_examples=30, deadline=None)
@given(counts_strategy)
def test_estimate_is_plug_in(counts):
    table = CountTable.from_mapping(counts)
    obs = estimate(table)
    for key in model.POP_KEYS:
        y, m, a, z = key
        assert obs.cell(y, m, a, z) == Fraction(counts[key], table.arm_total(z))


def test_parse_rejects_duplicates():
    text = "z,a,m,y,count\n0,0,0,0,3\n0,0,0,0,4\n1,0,0,0,1\n"
    with pytest.raises(ParseError, match="duplicate"):
        parse_counts(text)


def test_parse_rejects_bad_values():
    with pytest.raises(ParseError, match="header"):
        parse_table("w,a,m,y,count\n")
    with pytest.raises(ParseError, match="must be 0 or 1"):
        parse_counts("z,a,m,y,count\n2,0,0,0,1\n")
    with pytest.raises(ParseError, match="integer"):
        parse_counts("z,a,m,y,count\n0,0,0,0,1.5\n")
    with pytest.raises(ParseError, match="nonnegative"):
        parse_counts("z,a,m,y,count\n0,0,0,0,-1\n")
    with pytest.raises(ParseError, match="unrecognized"):
        parse_table("z;a;m;y\n")
    with pytest.raises(ParseError, match="empty"):
        parse_counts("")


def test_parse_requires_both_arms():
    with pytest.raises(ParseError, match="no observations"):
        parse_counts("z,a,m,y,count\n1,0,0,0,5\n")


def test_parse_skips_blank_lines():
    table = parse_counts("z,a,m,y,count\n0,0,0,0,2\n\n1,0,0,0,3\n")
    assert table.arm_total(0) == 2 and table.arm_total(1) == 3


def test_render_decimal_half_away_from_zero():
    assert render_decimal(Fraction(1, 8)) == "0.125"
    assert render_decimal(Fraction(1, 16)) == "0.063"
    assert render_decimal(Fraction(-1, 16)) == "-0.063"
    assert render_decimal(Fraction(1, 2000)) == "0.001"
    assert render_decimal(Fraction(-1, 2000)) == "-0.001"
    assert render_decimal(Fraction(0)) == "0.000"
    assert render_decimal(Fraction(-1, 3000)) == "0.000"  # no signed zero
    assert render_decimal(Fraction(2)) == "2.000"
    assert render_decimal(Fraction(-159, 200)) == "-0.795"


def test_feasibility_reports(jobs_observed, reversed_observed):
    ok = check_feasibility(jobs_observed, Assumptions.parse("a4"))
    assert ok.feasible and ok.margin_ok
    assert "feasible" in ok.describe()
    bad = check_feasibility(reversed_observed, Assumptions.parse("a4"))
    assert not bad.feasible and bad.margin_ok is False
    assert "contradicts" in bad.describe()
    neutral = check_feasibility(reversed_observed, Assumptions.parse("none"))
    assert neutral.feasible and neutral.margin_ok is None


def test_sort_key_orders_kinds_then_arms(jobs_observed):
    a4 = Assumptions.parse("a4")
    results = [
        evaluate(Parameter("lacme", 1), a4, jobs_observed),
        evaluate(Parameter("nde", 0), a4, jobs_observed),
        evaluate(Parameter("acme", 0), a4, jobs_observed),
        evaluate(Parameter("acme", 1), a4, jobs_observed),
    ]
    ordered = sorted(results, key=result_sort_key)
    names = [r.parameter.name() for r in ordered]
    assert names == ["acme(1)", "acme(0)", "nde(0)", "lacme(1)"]


def test_machine_roundtrip_mixed_methods(jobs_observed, reversed_observed):
    a4 = Assumptions.parse("a4")
    results = [
        evaluate(Parameter("acme", 1), a4, jobs_observed),
        oracle_bounds(jobs_observed, Parameter("acme", 1), a4),
        oracle_bounds(reversed_observed, Parameter("acme", 1), a4),  # infeasible
    ]
    text = render_machine(results)
    assert render_machine(results) == text  # deterministic
    back = parse_machine(text)
    assert len(back) == 3
    by_method = {(r["method"], r["status"]): r for r in back}
    cat = by_method[("catalog", "ok")]
    assert cat["lower"] == results[0].lower  # exact, not the 3dp shadow
    assert cat["lower_3dp"] == "-0.795"
    assert cat["active_lower_entry"]
    infeasible = by_method[("oracle", "infeasible")]
    assert infeasible["lower"] is None and infeasible["upper"] is None


def test_render_table_layout(jobs_observed):
    a4 = Assumptions.parse("a4")
    results = [
        evaluate(Parameter("acme", 1), a4, jobs_observed),
        oracle_bounds(jobs_observed, Parameter("acme", 1), a4),
    ]
    text = render_table(results)
    lines = text.splitlines()
    assert lines[0].startswith("parameter")
    assert "a4" in lines[0]
    assert any("acme(1) (catalog)" in line for line in lines)
    assert any("acme(1) (oracle)" in line for line in lines)
    assert "[-0.795, 0.585]" in text

    single = render_table(results[:1])
    assert "catalog" not in single  # method tag only when methods differ
