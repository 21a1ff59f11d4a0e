from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cardshuffle.enumeration import census
from cardshuffle.montecarlo import SimConfig, highest_tier_sweep, run_trials
from cardshuffle.deck import parse_deck
from cardshuffle.report import (
    FORMATS,
    SERIES,
    SchemaError,
    Table,
    bounds_table,
    census_table,
    figure_series,
    fmt_decimal,
    make_table,
    parse,
    parse_csv,
    parse_fraction,
    parse_svg_series,
    render,
    simulate_table,
    solve_table,
    stats_table,
    svg_figure,
    sweep_table,
    tierstats_table,
    to_csv,
)
from cardshuffle.solver import all_tier_stats

from conftest import solved

fractions = st.fractions(max_denominator=10**12).filter(lambda f: abs(f) < 10**15)


@given(fractions)
def test_fmt_decimal_matches_decimal_rounding(f):
    with localcontext() as ctx:
        ctx.prec = 60
        ref = (Decimal(f.numerator) / Decimal(f.denominator)).quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN)
    assert fmt_decimal(f) == ("0.000000" if ref == 0 else str(ref))


def test_fmt_decimal_examples():
    assert fmt_decimal(Fraction(82, 7)) == "11.714286"
    assert fmt_decimal(Fraction(-1, 3)) == "-0.333333"
    assert fmt_decimal(Fraction(5, 2), 0) == "2"


@given(fractions)
def test_fraction_text_round_trip(f):
    assert parse_fraction(str(f)) == f


def test_parse_fraction_rejects():
    with pytest.raises(SchemaError):
        parse_fraction("1/0")
    with pytest.raises(SchemaError):
        parse_fraction("abc")


cells = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc"), blacklist_characters="\r\n|"), max_size=12)


@given(st.lists(st.tuples(*[cells] * 6), max_size=6), st.sampled_from(FORMATS))
def test_round_trip_any_cells(rows, fmt):
    if fmt == "markdown":
        rows = [tuple(c.strip() for c in r) for r in rows]
    t = make_table("census", rows)
    text = render(t, fmt)
    back = parse(text, "census", fmt)
    assert back == t
    assert render(back, fmt) == text


def _builders():
    t3 = solved(3)
    sim = run_trials(SimConfig(parse_deck("000111"), 50, 1))
    return {
        "census": census_table(census(4)),
        "solve": solve_table(t3, decimals=True),
        "stats": stats_table(all_tier_stats(solved(4))),
        "tierstats": tierstats_table(all_tier_stats(solved(4))),
        "bounds": bounds_table(5),
        "simulate": simulate_table([sim]),
        "sweep": sweep_table(highest_tier_sweep(3, 20, 1)),
    }


@pytest.mark.parametrize("fmt", FORMATS)
def test_every_schema_round_trips(fmt):
    for name, table in _builders().items():
        text = render(table, fmt)
        assert render(parse(text, name, fmt), fmt) == text


def test_schema_headers():
    b = _builders()
    assert to_csv(b["census"]).splitlines()[0] == "n,k,total,r_count,d_count,longest_chain_len"
    assert to_csv(b["solve"]).splitlines()[0] == "deck,tier,class,lambda_num,lambda_den,decimal"
    assert to_csv(b["tierstats"]).splitlines()[0] == (
        "n,k,m_num,m_den,M_num,M_den,Mr_num,Mr_den,mean_num,mean_den,lcd,argmin,argmax,argmax_r")
    assert to_csv(b["simulate"]).splitlines()[0] == "deck,n,tier,trials,seed,mean,stddev,min,max,mean_random_moves"
    # n=5, k=1: upper_Mr = n^2 + 5n/3 and upper_M_v2 adds 2n - 3
    assert to_csv(b["bounds"]).splitlines()[1] == (
        "5,1,2878/99,3571/99,100/3,121/3,29.070707,36.070707,33.333333,40.333333")


def test_bounds_row_values():
    row = bounds_table(3).records()[0]
    assert row["lower_m"] == "82/7" and row["lower_m_decimal"] == "11.714286"


def test_schema_errors():
    with pytest.raises(SchemaError):
        parse_csv("a,b\n1,2\n", "census")
    with pytest.raises(SchemaError):
        parse_csv("", "census")
    with pytest.raises(SchemaError):
        parse_csv("n,k,total,r_count,d_count,longest_chain_len\n1,2\n", "census")
    with pytest.raises(SchemaError):
        make_table("census", [(1, 2)])
    with pytest.raises(SchemaError):
        parse("{}", "census", "json")


# --- figure ------------------------------------------------------------------

def test_svg_structure_and_determinism():
    stats = all_tier_stats(solved(5))
    svg = svg_figure(5, stats)
    assert svg == svg_figure(5, stats)
    root = ET.fromstring(svg)
    assert root.get("width") == "960" and root.get("height") == "640"
    labels = [t.text for t in root.iter("{http://www.w3.org/2000/svg}text") if t.get("class") == "axis-label"]
    assert labels == ["tier", "expected moves"]
    legend = [t.get("data-series") for t in root.iter("{http://www.w3.org/2000/svg}text") if t.get("data-series")]
    assert legend == [key for key, *_ in SERIES]
    colours = {key: colour for key, _, colour, _ in SERIES}
    assert colours["lower_bound"].startswith("#1f") and colours["upper_bound"] == "#d62728"


def test_svg_values_equal_stats():
    stats = all_tier_stats(solved(5))
    points = parse_svg_series(svg_figure(5, stats))
    assert len(points) == 5
    for s in stats:
        assert points["M_k"][s.k] == s.M_k
        assert points["m_k"][s.k] == s.m_k
        assert points["tier_mean"][s.k] == s.tier_mean
    assert {k: v for k, v in figure_series(stats)["upper_bound"]} == points["upper_bound"]


def test_svg_degenerate_n2():
    svg = svg_figure(2, all_tier_stats(solved(2)))
    pts = parse_svg_series(svg)
    assert pts["m_k"] == {1: 6} and pts["M_k"] == {1: 7}
