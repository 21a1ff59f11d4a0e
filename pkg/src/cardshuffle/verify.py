"""Run every invariant suite up to ``n_max`` and collect a machine-readable report.

Each suite returns a :class:`SuiteResult`.  Suites that read exact values use
one shared table per ``n`` (from :func:`tier_solve`), so a fault injected
into that table shows up in every suite that depends on it.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

from . import formulas
from .deck import (
    Deck,
    DeckClass,
    classify,
    is_rdeck_bits,
    iter_tier1_names,
    parse_deck,
    predecessor_bits,
    rotate_bits,
    step_distribution,
    tier1_deck,
    tier1_name,
    tier_bits,
)
from .enumeration import census, d_count_formula, r_count_formula, tier_buckets, tier_size_formula
from .errors import OutOfRangeError
from .montecarlo import SimConfig, run_trials, trial_counts
from .solver import FUNDAMENTAL_MAX_N, AbsorptionTable, all_tier_stats, fundamental_solve, tier_solve, verify_balance

VERIFY_MAX_N = 8
MAX_LISTED = 20

# tier-2 common denominators for n = 3..6
TIER2_LCD = {3: 7, 4: 176148, 5: 18420324934572, 6: 438067323206466940220363196436798}


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def expect(self, cond: bool, msg: str) -> None:
        self.checked += 1
        if not cond:
            self.failures.append(msg)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        d["failure_count"] = len(self.failures)
        d["failures"] = self.failures[:MAX_LISTED]
        d["seconds"] = round(self.seconds, 3)
        return d


@dataclass
class VerifyReport:
    n_max: int
    suites: list[SuiteResult]
    fault: str | None = None

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)

    @property
    def failing(self) -> list[str]:
        return [s.name for s in self.suites if not s.ok]

    def to_dict(self) -> dict:
        return {"n_max": self.n_max, "ok": self.ok, "fault": self.fault,
                "failing_suites": self.failing, "suites": [s.to_dict() for s in self.suites]}


Tables = dict[int, AbsorptionTable]


# ---------------------------------------------------------------------------
# suites


def suite_deck(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("deck")
    for n in range(1, n_max + 1):
        for k, bucket in enumerate(tier_buckets(n)):
            for b in bucket:
                d = Deck(n, b)
                res.expect(parse_deck(str(d)) == d, f"{d}: parse(render) round trip")
                if classify(d) is DeckClass.ABSORBING:
                    continue
                dist = step_distribution(d)
                res.expect(sum(dist.values()) == 1, f"{d}: step distribution sums to {sum(dist.values())}")
                for s in dist:
                    res.expect(tier_bits(s.bits) in (k, k - 1),
                               f"{d} -> {s}: tier {k} -> {tier_bits(s.bits)}")
                if not is_rdeck_bits(b):
                    s = rotate_bits(b, n)
                    res.expect(tier_bits(s) == k, f"{d}: deterministic move left tier {k}")
                    res.expect(predecessor_bits(s, n) == b, f"{d}: predecessor of successor differs")
        if n >= 2:
            for m, k in iter_tier1_names(n):
                d = tier1_deck(n, m, k)
                res.expect(tier1_name(d) == (m, k), f"tier1_name(tier1_deck({n},{m},{k}))")
                if k >= 1:
                    res.expect(step_distribution(d) == {tier1_deck(n, m, k - 1): Fraction(1)},
                               f"[{m},{k}] at n={n} does not step to [{m},{k - 1}]")
    return res


def suite_census(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("census")
    for n in range(1, n_max + 1):
        c = census(n)
        res.expect(c.total == math.comb(2 * n, n) // 2, f"n={n}: total {c.total}")
        for t in c.tiers:
            k = t.k
            res.expect(t.total == tier_size_formula(n, k), f"n={n} k={k}: total {t.total}")
            res.expect(t.r_count == r_count_formula(n, k), f"n={n} k={k}: r_count {t.r_count}")
            res.expect(t.d_count == d_count_formula(n, k), f"n={n} k={k}: d_count {t.d_count}")
            if k >= 1:
                longest = [ch for ch in t.chains if ch.length == 2 * n - 2 * k]
                res.expect(len(longest) == 1, f"n={n} k={k}: {len(longest)} chains of length {2 * n - 2 * k}")
                res.expect(t.longest_chain_len <= 2 * n - 2 * k, f"n={n} k={k}: chain longer than {2 * n - 2 * k}")
                res.expect(t.r_count * (n - k) == t.d_count * k, f"n={n} k={k}: r/d ratio")
    return res


def suite_descent(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("descent")
    for n in range(2, n_max + 1):
        rep = formulas.verify_lower_tier_probability(n)
        res.checked += rep.checked
        res.failures += [f"n={n} {d}: mass {p}" for d, p in rep.mismatches]
    return res


def suite_oracle(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("oracle-equivalence")
    for n in range(1, min(n_max, FUNDAMENTAL_MAX_N) + 1):
        ref = fundamental_solve(n)
        t = tables[n]
        for b, v in ref.values.items():
            res.expect(t.values.get(b) == v, f"n={n} {Deck(n, b)}: tier solve {t.values.get(b)} vs {v}")
    return res


def suite_balance(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("balance")
    for n in range(1, n_max + 1):
        rep = verify_balance(tables[n])
        res.checked += rep.checked
        res.failures += [f"n={n} {d}" for d in rep.violations]
    return res


def suite_tier1(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("tier1-closed-form")
    for n in range(2, n_max + 1):
        t = tables[n]
        for m, k in iter_tier1_names(n):
            d = tier1_deck(n, m, k)
            res.expect(t[d] == formulas.tier1_lambda(n, m, k), f"n={n} [{m},{k}] {d}")
        for m in range(1, n - 1):
            res.expect(formulas.tier1_lambda_r(n, m + 1) > formulas.tier1_lambda_r(n, m),
                       f"n={n}: [m,0] not increasing at m={m}")
            res.expect(formulas.tier1_lambda(n, m + 1, 2 * n - 2 * m - 3)
                       < formulas.tier1_lambda(n, m, 2 * n - 2 * m - 1),
                       f"n={n}: chain tops not decreasing at m={m}")
        lo, hi = formulas.tier1_extremes(n)
        st = all_tier_stats(t)[0]
        res.expect((st.m_k, st.M_k) == (lo, hi), f"n={n}: tier-1 extremes")
    return res


def suite_tier_minima(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("tier-minima")
    for n in range(2, n_max + 1):
        for s in all_tier_stats(tables[n]):
            res.expect(classify(s.argmin_deck) is DeckClass.RDECK, f"n={n} k={s.k}: argmin {s.argmin_deck} is a d-deck")
    return res


def suite_denominators(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("denominators")
    for n in range(2, n_max + 1):
        stats = all_tier_stats(tables[n])
        closed = math.lcm(*(formulas.tier1_lambda(n, m, k).denominator for m, k in iter_tier1_names(n)))
        res.expect(stats[0].common_denominator == closed, f"n={n}: tier-1 LCD {stats[0].common_denominator} vs {closed}")
        if n in TIER2_LCD:
            res.expect(stats[1].common_denominator == TIER2_LCD[n], f"n={n}: tier-2 LCD {stats[1].common_denominator}")
    return res


def suite_bounds(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("bounds")
    for n in range(2, n_max + 1):
        for s in all_tier_stats(tables[n]):
            b = formulas.bounds(n, s.k)
            tag = f"n={n} k={s.k}"
            res.expect(b.lower_m <= s.m_k, f"{tag}: m_k below lower bound")
            res.expect(s.M_k <= b.upper_M_v1, f"{tag}: M_k above first upper bound")
            res.expect(s.M_k <= b.upper_M_v2, f"{tag}: M_k above second upper bound")
            res.expect(s.M_k_r <= b.upper_Mr, f"{tag}: M^r_k above its bound")
            res.expect(b.upper_M_v2 == b.upper_Mr + 2 * n - 2 * s.k - 1, f"{tag}: v2 != Mr bound + chain length")
        if n >= 3:
            res.expect(all_tier_stats(tables[n])[1].M_k_r <= formulas.m2r_upper_bound(n), f"n={n}: M^r_2 bound")
    return res


def suite_recursions(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("recursions")
    for n in range(2, n_max + 1):
        stats = all_tier_stats(tables[n])
        m = [Fraction(0)] + [s.m_k for s in stats]
        M = [Fraction(0)] + [s.M_k for s in stats]
        Mr = [Fraction(0)] + [s.M_k_r for s in stats]
        for k in range(1, n):
            res.expect(m[k] >= formulas.min_recursion_rhs(n, k, m[k - 1], m[k]), f"n={n} k={k}: min recursion")
            res.expect(M[k] <= formulas.max_recursion_rhs(n, k, M[k - 1], M[k]), f"n={n} k={k}: max recursion")
            if k >= 3:
                res.expect(Mr[k] <= formulas.refined_recursion_rhs(n, k, Mr[k - 1], Mr[k - 2]),
                           f"n={n} k={k}: refined recursion")
    return res


def suite_dd(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("dd-inequality")
    for n in range(3, n_max + 1):
        rep = formulas.check_dd_inequality(n)
        res.checked += rep.checked
        res.failures += [f"n={n} {v.deck} -> {v.successor}: d={v.d} d'={v.d_prime} bound {v.bound}"
                         for v in rep.violations]
    return res


def suite_montecarlo(n_max: int, tables: Tables) -> SuiteResult:
    res = SuiteResult("montecarlo-reproducibility")
    for n in range(2, n_max + 1):
        d = Deck(n, tier_buckets(n)[n - 1][0])
        cfg = SimConfig(d, 200, master_seed=n)
        whole = run_trials(cfg, check_tiers=True)
        res.expect(run_trials(cfg, batch_size=37) == whole, f"n={n}: batching changed the result")
        res.expect(trial_counts(d, n, 0, 50, use_kernel=True) == trial_counts(d, n, 0, 50, use_kernel=False),
                   f"n={n}: kernel and Python paths differ")
    return res


SUITES: tuple[Callable[[int, Tables], SuiteResult], ...] = (
    suite_deck, suite_census, suite_descent, suite_oracle, suite_balance, suite_tier1,
    suite_tier_minima, suite_denominators, suite_bounds, suite_recursions, suite_dd, suite_montecarlo,
)


def run_verify(n_max: int, fault: str | None = None, fault_delta: int = 1) -> VerifyReport:
    """Run all suites for n = 1..n_max; ``fault`` names a deck whose value is shifted."""
    if not 1 <= n_max <= VERIFY_MAX_N:
        raise OutOfRangeError(f"n_max must be in [1, {VERIFY_MAX_N}], got {n_max}")
    tables: Tables = {n: tier_solve(n) for n in range(1, n_max + 1)}
    if fault is not None:
        d = parse_deck(fault)
        if d.n > n_max:
            raise OutOfRangeError(f"fault deck {d} has n={d.n} > n_max={n_max}")
        tables[d.n] = tables[d.n].perturbed(d, fault_delta)
    results = []
    for suite in SUITES:
        t0 = time.perf_counter()
        r = suite(n_max, tables)
        r.seconds = time.perf_counter() - t0
        results.append(r)
    return VerifyReport(n_max, results, fault)
