"""Tabular output: CSV, JSON and Markdown emitters with parsers, plus the SVG figure.

A :class:`Table` is a schema name, a column tuple and rows of strings.
Rationals are written as ``p/q`` (plain ``p`` when integral); decimal
columns are display only and never parsed back into numbers.
"""

from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .deck import Deck, classify, tier_of
from .enumeration import TierCensus
from .errors import OutOfRangeError, ShuffleError
from .formulas import bounds
from .montecarlo import SimResult, SweepRow
from .solver import AbsorptionTable, TierStats

FORMATS = ("csv", "json", "markdown")


class SchemaError(ShuffleError, ValueError):
    """Parsed text does not match the expected schema."""


SCHEMAS: dict[str, tuple[str, ...]] = {
    "enumerate": ("rank", "deck", "tier", "class"),
    "census": ("n", "k", "total", "r_count", "d_count", "longest_chain_len"),
    "solve": ("deck", "tier", "class", "lambda_num", "lambda_den"),
    "stats": ("n", "k", "m", "argmin", "Mr", "argmax_r", "M", "argmax"),
    "tierstats": ("n", "k", "m_num", "m_den", "M_num", "M_den", "Mr_num", "Mr_den",
                  "mean_num", "mean_den", "lcd", "argmin", "argmax", "argmax_r"),
    "bounds": ("n", "k", "lower_m", "upper_M_v1", "upper_Mr", "upper_M_v2"),
    "simulate": ("deck", "n", "tier", "trials", "seed", "mean", "stddev", "min", "max",
                 "mean_random_moves"),
    "sweep": ("label", "deck", "n", "tier", "trials", "seed", "mean", "stddev", "min", "max",
              "mean_random_moves"),
}


def fmt_fraction(f: Fraction) -> str:
    return str(f)


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"not a rational: {text!r}") from exc


def fmt_decimal(f: Fraction, places: int = 6) -> str:
    """Fixed-point rendering, rounded half-to-even from the exact value."""
    scaled = round(f * 10**places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def fmt_float(x: float, places: int = 6) -> str:
    return f"{x:.{places}f}"


@dataclass(frozen=True)
class Table:
    schema: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def records(self) -> list[dict[str, str]]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def column(self, name: str) -> list[str]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def make_table(schema: str, rows: Iterable[Sequence[object]], extra: Sequence[str] = ()) -> Table:
    cols = SCHEMAS[schema] + tuple(extra)
    out = []
    for r in rows:
        r = tuple(str(v) for v in r)
        if len(r) != len(cols):
            raise SchemaError(f"{schema}: row has {len(r)} fields, expected {len(cols)}")
        out.append(r)
    return Table(schema, cols, tuple(out))


def _check_columns(schema: str, cols: Sequence[str]) -> tuple[str, ...]:
    base = SCHEMAS[schema]
    cols = tuple(cols)
    if cols[: len(base)] != base:
        raise SchemaError(f"{schema}: expected columns starting {','.join(base)}, got {','.join(cols)}")
    return cols


# ---------------------------------------------------------------------------
# emitters and parsers


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    w.writerows(table.rows)
    return buf.getvalue()


def parse_csv(text: str, schema: str) -> Table:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise SchemaError("empty CSV")
    cols = _check_columns(schema, rows[0])
    body = rows[1:]
    for r in body:
        if len(r) != len(cols):
            raise SchemaError(f"{schema}: row {r} has {len(r)} fields, expected {len(cols)}")
    return Table(schema, cols, tuple(tuple(r) for r in body))


def to_json(table: Table) -> str:
    doc = {"schema": table.schema, "columns": list(table.columns), "rows": table.records()}
    return json.dumps(doc, indent=2) + "\n"


def parse_json(text: str, schema: str) -> Table:
    try:
        doc = json.loads(text)
        cols = _check_columns(schema, doc["columns"])
        rows = tuple(tuple(rec[c] for c in cols) for rec in doc["rows"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise SchemaError(f"bad {schema} JSON: {exc}") from exc
    return Table(schema, cols, rows)


def to_markdown(table: Table) -> str:
    lines = ["| " + " | ".join(table.columns) + " |",
             "|" + "|".join("---" for _ in table.columns) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in table.rows]
    return "\n".join(lines) + "\n"


def parse_markdown(text: str, schema: str) -> Table:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if len(lines) < 2:
        raise SchemaError("markdown table needs a header and separator")

    def cells(ln: str) -> tuple[str, ...]:
        return tuple(c.strip() for c in ln.strip("|").split("|"))

    cols = _check_columns(schema, cells(lines[0]))
    return Table(schema, cols, tuple(cells(ln) for ln in lines[2:]))


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    if fmt == "markdown":
        return to_markdown(table)
    raise OutOfRangeError(f"format {fmt!r} not available for tables")


def parse(text: str, schema: str, fmt: str) -> Table:
    return {"csv": parse_csv, "json": parse_json, "markdown": parse_markdown}[fmt](text, schema)


# ---------------------------------------------------------------------------
# builders


def enumerate_table(decks: Iterable[Deck], first_rank: int = 0) -> Table:
    return make_table("enumerate", ((first_rank + i, d, tier_of(d), classify(d).value)
                                    for i, d in enumerate(decks)))


def census_table(c: TierCensus) -> Table:
    return make_table("census", ((c.n, t.k, t.total, t.r_count, t.d_count, t.longest_chain_len)
                                 for t in c.tiers))


def solve_table(table: AbsorptionTable, decimals: bool = False) -> Table:
    rows = []
    for d, v in table.items():
        row = [d, tier_of(d), classify(d).value, v.numerator, v.denominator]
        if decimals:
            row.append(fmt_decimal(v))
        rows.append(row)
    return make_table("solve", rows, ("decimal",) if decimals else ())


def stats_table(stats: Sequence[TierStats]) -> Table:
    return make_table("stats", ((s.n, s.k, fmt_fraction(s.m_k), s.argmin_deck, fmt_fraction(s.M_k_r),
                                 s.argmax_r_deck, fmt_fraction(s.M_k), s.argmax_deck) for s in stats))


def tierstats_table(stats: Sequence[TierStats]) -> Table:
    return make_table("tierstats", (
        (s.n, s.k, s.m_k.numerator, s.m_k.denominator, s.M_k.numerator, s.M_k.denominator,
         s.M_k_r.numerator, s.M_k_r.denominator, s.tier_mean.numerator, s.tier_mean.denominator,
         s.common_denominator, s.argmin_deck, s.argmax_deck, s.argmax_r_deck)
        for s in stats))


_BOUND_FIELDS = ("lower_m", "upper_M_v1", "upper_Mr", "upper_M_v2")


def bounds_table(n: int, ks: Iterable[int] | None = None) -> Table:
    rows = []
    for k in ks if ks is not None else range(1, n):
        b = bounds(n, k)
        vals = [getattr(b, f) for f in _BOUND_FIELDS]
        rows.append([n, k, *map(fmt_fraction, vals), *map(fmt_decimal, vals)])
    return make_table("bounds", rows, tuple(f"{f}_decimal" for f in _BOUND_FIELDS))


def _sim_fields(r: SimResult) -> list[object]:
    cfg = r.config
    return [cfg.start_deck, cfg.n, tier_of(cfg.start_deck), r.trials, cfg.master_seed,
            fmt_float(r.mean_moves, 3), fmt_float(r.stddev, 3), r.min_moves, r.max_moves,
            fmt_float(r.mean_random_moves, 3)]


def simulate_table(results: Iterable[SimResult]) -> Table:
    return make_table("simulate", (_sim_fields(r) for r in results))


def sweep_table(rows: Iterable[SweepRow]) -> Table:
    return make_table("sweep", ([row.label, *_sim_fields(row.result)] for row in rows))


# ---------------------------------------------------------------------------
# SVG figure

WIDTH, HEIGHT = 960, 640
_LEFT, _RIGHT, _TOP, _BOTTOM = 90, 720, 50, 570

# (key, legend text, colour, drawn as a curve)
SERIES = (
    ("lower_bound", "lower bound on m_k", "#1f4fd8", True),
    ("upper_bound", "upper bound on M_k", "#d62728", True),
    ("M_k", "M_k (exact)", "#ff8c00", False),
    ("m_k", "m_k (exact)", "#00bcd4", False),
    ("tier_mean", "tier mean (exact)", "#808080", False),
)


def figure_series(stats: Sequence[TierStats]) -> dict[str, list[tuple[int, Fraction]]]:
    """The five plotted series as exact (k, value) pairs."""
    out: dict[str, list[tuple[int, Fraction]]] = {key: [] for key, *_ in SERIES}
    for s in stats:
        b = bounds(s.n, s.k)
        out["lower_bound"].append((s.k, b.lower_m))
        out["upper_bound"].append((s.k, b.upper_M_v2))
        out["M_k"].append((s.k, s.M_k))
        out["m_k"].append((s.k, s.m_k))
        out["tier_mean"].append((s.k, s.tier_mean))
    return out


def _f2(x: float) -> str:
    return f"{x:.2f}"


def svg_figure(n: int, stats: Sequence[TierStats]) -> str:
    """Deterministic 960x640 SVG of exact tier data against the bounds."""
    if not stats:
        raise OutOfRangeError(f"nothing to plot for n={n}")
    series = figure_series(stats)
    ks = [s.k for s in stats]
    values = [v for pts in series.values() for _, v in pts]
    lo, hi = float(min(values)), float(max(values))
    pad = (hi - lo) * 0.05 or max(1.0, abs(hi) * 0.05)
    lo, hi = lo - pad, hi + pad
    kmin, kmax = min(ks), max(ks)

    def x_of(k: int) -> float:
        if kmax == kmin:
            return (_LEFT + _RIGHT) / 2
        return _LEFT + (k - kmin) * (_RIGHT - _LEFT) / (kmax - kmin)

    def y_of(v: Fraction) -> float:
        return _BOTTOM - (float(v) - lo) * (_BOTTOM - _TOP) / (hi - lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-n="{n}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{(_LEFT + _RIGHT) // 2}" y="30" text-anchor="middle" font-size="18">'
        f'Expected moves to absorption by tier, n = {n}</text>',
        f'<line x1="{_LEFT}" y1="{_BOTTOM}" x2="{_RIGHT}" y2="{_BOTTOM}" stroke="black"/>',
        f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_BOTTOM}" stroke="black"/>',
    ]
    for k in ks:
        x = _f2(x_of(k))
        out.append(f'<line x1="{x}" y1="{_BOTTOM}" x2="{x}" y2="{_BOTTOM + 6}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{_BOTTOM + 22}" text-anchor="middle" font-size="14">{k}</text>')
    for i in range(6):
        v = lo + (hi - lo) * i / 5
        y = _f2(_BOTTOM - (_BOTTOM - _TOP) * i / 5)
        out.append(f'<line x1="{_LEFT - 6}" y1="{y}" x2="{_LEFT}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 10}" y="{y}" text-anchor="end" dominant-baseline="middle" '
                   f'font-size="12">{v:.1f}</text>')
    out.append(f'<text class="axis-label" x="{(_LEFT + _RIGHT) // 2}" y="{_BOTTOM + 50}" '
               f'text-anchor="middle" font-size="16">tier</text>')
    out.append(f'<text class="axis-label" x="25" y="{(_TOP + _BOTTOM) // 2}" text-anchor="middle" '
               f'font-size="16" transform="rotate(-90 25 {(_TOP + _BOTTOM) // 2})">expected moves</text>')

    for key, _, colour, curve in SERIES:
        pts = series[key]
        out.append(f'<g class="series" data-series="{key}" fill="{colour}" stroke="{colour}">')
        if curve and len(pts) > 1:
            path = " ".join(f"{_f2(x_of(k))},{_f2(y_of(v))}" for k, v in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke-width="2"/>')
        r = 3 if curve else 5
        for k, v in pts:
            out.append(f'<circle cx="{_f2(x_of(k))}" cy="{_f2(y_of(v))}" r="{r}" '
                       f'data-k="{k}" data-value="{v}"/>')
        out.append("</g>")

    out.append('<g class="legend">')
    for i, (key, label, colour, curve) in enumerate(SERIES):
        y = _TOP + 20 + 26 * i
        if curve:
            out.append(f'<line x1="740" y1="{y}" x2="770" y2="{y}" stroke="{colour}" stroke-width="2"/>')
        else:
            out.append(f'<circle cx="755" cy="{y}" r="5" fill="{colour}"/>')
        out.append(f'<text x="780" y="{y}" dominant-baseline="middle" font-size="13" '
                   f'data-series="{key}">{label}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def parse_svg_series(svg: str) -> dict[str, dict[int, Fraction]]:
    """Read the exact point values back out of :func:`svg_figure` output."""
    ns = "{http://www.w3.org/2000/svg}"
    root = ET.fromstring(svg)
    out: dict[str, dict[int, Fraction]] = {}
    for g in root.iter(f"{ns}g"):
        key = g.get("data-series")
        if key is None:
            continue
        out[key] = {int(c.get("data-k")): Fraction(c.get("data-value")) for c in g.iter(f"{ns}circle")}
    return out
