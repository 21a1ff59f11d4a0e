"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 verification failure.  When
``CARDSHUFFLE_OUT_DIR`` is set, relative ``--out`` paths resolve inside it
and commands without ``--out`` write a default file name there.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import report
from .deck import parse_deck, tier_of
from .enumeration import census, enumerate_decks, tier_buckets
from .errors import OutOfRangeError, ShuffleError, TooLargeError
from .montecarlo import SimConfig, highest_tier_sweep, run_trials
from .solver import DENSE_MAX_N, TIER_SOLVE_MAX_N, AbsorptionTable, all_tier_stats, tier_solve
from .verify import run_verify

OUT_DIR_ENV = "CARDSHUFFLE_OUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 2, 3
_EXT = {"csv": "csv", "json": "json", "markdown": "md", "svg": "svg"}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _solve_table(n: int, max_tier: int | None):
    if n > TIER_SOLVE_MAX_N:
        raise TooLargeError(f"n={n} exceeds the solver ceiling {TIER_SOLVE_MAX_N}")
    if n > DENSE_MAX_N and max_tier is None:
        raise TooLargeError(f"a full solve is impractical for n={n} > {DENSE_MAX_N}; pass --max-tier")
    return tier_solve(n, max_tier)


def _stats(n: int, max_tier: int | None):
    if n < 2:
        raise OutOfRangeError("stats needs n >= 2 (tier 1 is empty otherwise)")
    return all_tier_stats(_solve_table(n, max_tier))


# ---------------------------------------------------------------------------
# commands; each returns the rendered text


def cmd_enumerate(a) -> str:
    decks = enumerate_decks(a.n)
    if a.k is not None:
        if not 0 <= a.k <= a.n - 1:
            raise OutOfRangeError(f"k must be in [0, {a.n - 1}]")
        decks = [d for d in decks if d.bits in set(tier_buckets(a.n)[a.k])]
    return report.render(report.enumerate_table(decks), a.format)


def cmd_census(a) -> str:
    return report.render(report.census_table(census(a.n)), a.format)


def cmd_solve(a) -> str:
    if a.deck is not None:
        d = parse_deck(a.deck)
        if a.n is not None and a.n != d.n:
            raise OutOfRangeError(f"--deck has n={d.n}, --n says {a.n}")
        table = _solve_table(d.n, tier_of(d) if d.n > DENSE_MAX_N else a.max_tier)
        if d not in table:
            raise OutOfRangeError(f"{d} lies above --max-tier {a.max_tier}")
        single = AbsorptionTable(d.n, {d.bits: table[d]}, table.max_tier)
        return report.render(report.solve_table(single, a.decimals), a.format)
    _need(a, "n")
    table = _solve_table(a.n, a.max_tier)
    if a.k is not None:
        kept = {d.bits: v for d, v in table.tier(a.k)}
        table = AbsorptionTable(a.n, kept, table.max_tier)
    return report.render(report.solve_table(table, a.decimals), a.format)


def cmd_stats(a) -> str:
    stats = _stats(a.n, a.max_tier)
    if a.k is not None:
        stats = [s for s in stats if s.k == a.k]
        if not stats:
            raise OutOfRangeError(f"no tier {a.k} for n={a.n}")
    table = report.tierstats_table(stats) if a.full else report.stats_table(stats)
    return report.render(table, a.format)


def cmd_bounds(a) -> str:
    if a.n < 2:
        raise OutOfRangeError("bounds need n >= 2")
    ks = None if a.k is None else [a.k]
    return report.render(report.bounds_table(a.n, ks), a.format)


def cmd_simulate(a) -> str:
    _need(a, "deck")
    d = parse_deck(a.deck)
    if a.n is not None and a.n != d.n:
        raise OutOfRangeError(f"--deck has n={d.n}, --n says {a.n}")
    res = run_trials(SimConfig(d, a.trials, a.seed, a.max_steps))
    return report.render(report.simulate_table([res]), a.format)


def cmd_sweep(a) -> str:
    return report.render(report.sweep_table(highest_tier_sweep(a.n, a.trials, a.seed)), a.format)


def cmd_figure(a) -> str:
    if a.format not in (None, "svg"):
        raise OutOfRangeError("figure only renders svg")
    return report.svg_figure(a.n, _stats(a.n, a.max_tier))


def cmd_verify(a) -> str:
    rep = run_verify(a.n, fault=a.inject_fault)
    a._exit = EXIT_OK if rep.ok else EXIT_VERIFY
    return json.dumps(rep.to_dict(), indent=2) + "\n"


def _need(a, name: str) -> None:
    if getattr(a, name) is None:
        raise OutOfRangeError(f"{a.command} requires --{name.replace('_', '-')}")


COMMANDS = {
    "enumerate": (cmd_enumerate, "list canonical decks", ("n",)),
    "census": (cmd_census, "tier sizes, r/d counts and longest chains", ("n",)),
    "solve": (cmd_solve, "exact expected moves per deck", ()),
    "stats": (cmd_stats, "per-tier extremes m_k, M^r_k, M_k", ("n",)),
    "bounds": (cmd_bounds, "harmonic bounds per tier", ("n",)),
    "simulate": (cmd_simulate, "Monte Carlo estimate for one deck", ()),
    "sweep": (cmd_sweep, "simulate every deck 0^(n-j) 1^n 0^j", ("n",)),
    "figure": (cmd_figure, "SVG of exact tier data against the bounds", ("n",)),
    "verify": (cmd_verify, "run every invariant suite up to n", ("n",)),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cardshuffle", description="Exact and simulated absorption times of the two-colour shuffle.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text, required) in COMMANDS.items():
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--n", type=int, required="n" in required)
        s.add_argument("--k", type=int)
        s.add_argument("--deck")
        s.add_argument("--trials", type=int, default=1000)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--max-steps", type=int)
        s.add_argument("--max-tier", type=int)
        s.add_argument("--full", action="store_true", help="stats: emit the numerator/denominator schema")
        s.add_argument("--decimals", action="store_true", help="solve: add a 6-place decimal column")
        fmts = ["svg"] if name == "figure" else ["json"] if name == "verify" else list(report.FORMATS)
        s.add_argument("--format", choices=fmts, default=fmts[0])
        s.add_argument("--out")
        if name == "verify":
            s.add_argument("--inject-fault", metavar="DECK", help="shift this deck's value by 1 before checking")
    return p


def _destination(a) -> Path | None:
    env = os.environ.get(OUT_DIR_ENV)
    if a.out is not None:
        path = Path(a.out)
        return Path(env) / path if env and not path.is_absolute() else path
    if env:
        tag = f"_n{a.n}" if a.n is not None else ""
        return Path(env) / f"{a.command}{tag}.{_EXT[a.format]}"
    return None


def main(argv: list[str] | None = None) -> int:
    a = build_parser().parse_args(argv)
    a._exit = EXIT_OK
    try:
        text = COMMANDS[a.command][0](a)
    except (ShuffleError, ValueError) as exc:
        print(f"cardshuffle {a.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    dest = _destination(a)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    return a._exit


if __name__ == "__main__":
    sys.exit(main())
