"""Closed forms: tier-1 absorption times, harmonic bounds, and structural checks.

Everything here is exact (``Fraction``); decimals only appear when a value
is rendered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .deck import Deck, alternating_bits, chain_end_bits, insertion_counts, is_rdeck_bits, tier_bits
from .enumeration import tier_buckets
from .errors import OutOfRangeError


@lru_cache(maxsize=None)
def harmonic(k: int) -> Fraction:
    if k < 0:
        raise OutOfRangeError(f"harmonic index must be >= 0, got {k}")
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


def _check_k(n: int, k: int, lo: int = 1) -> None:
    if not lo <= k <= n - 1:
        raise OutOfRangeError(f"k must be in [{lo}, {n - 1}] for n={n}, got {k}")


# ---------------------------------------------------------------------------
# tier 1


def tier1_lambda_r(n: int, m: int) -> Fraction:
    """Expected moves from the tier-1 r-deck ``[m, 0]``."""
    if not 1 <= m <= n - 1:
        raise OutOfRangeError(f"m must be in [1, {n - 1}], got {m}")
    return n * n + Fraction(2 * n, 3) + m - Fraction(n * n + 2 * m * m - m, 4 * n * n - 1)


def tier1_lambda(n: int, m: int, k: int) -> Fraction:
    """Expected moves from ``[m, k]``: k deterministic steps, then ``[m, 0]``."""
    if not 0 <= k <= 2 * n - 2 * m - 1:
        raise OutOfRangeError(f"k must be in [0, {2 * n - 2 * m - 1}], got {k}")
    return tier1_lambda_r(n, m) + k


def tier1_extremes(n: int) -> tuple[Fraction, Fraction]:
    """(min, max) of lambda over tier 1, attained at [1, 0] and [1, 2n-3]."""
    if n < 2:
        raise OutOfRangeError(f"tier 1 is empty for n={n}")
    tail = Fraction(5, 4 * (4 * n * n - 1))
    lo = n * n + Fraction(2 * n, 3) + Fraction(3, 4) - tail
    hi = n * n + Fraction(8 * n, 3) - Fraction(9, 4) - tail
    return lo, hi


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class BoundsRecord:
    n: int
    k: int
    lower_m: Fraction
    upper_M_v1: Fraction
    upper_Mr: Fraction
    upper_M_v2: Fraction


def bounds(n: int, k: int) -> BoundsRecord:
    _check_k(n, k)
    H = harmonic(k)
    tail = Fraction(5, 4 * (4 * n * n - 1))
    lower_m = n * n + 2 * n * H - Fraction(4 * n, 3) + Fraction(3, 4) - tail
    upper_v1 = 4 * n * n * H - 3 * n * n - 4 * n * k + Fraction(20 * n, 3) - Fraction(9, 4) - tail
    upper_mr = 2 * n * n * H - n * n - n * (k - Fraction(8, 3))
    upper_v2 = 2 * n * n * H - n * n - n * (k - Fraction(14, 3)) - 2 * k - 1
    return BoundsRecord(n, k, lower_m, upper_v1, upper_mr, upper_v2)


def m2r_upper_bound(n: int) -> Fraction:
    """Upper bound on the largest r-deck value in tier 2 (n >= 3)."""
    if n < 3:
        raise OutOfRangeError(f"tier 2 needs n >= 3, got {n}")
    return 2 * n * n + Fraction(n, 6) + Fraction(3, 4) + Fraction(6 * n - 17, 4 * (4 * n * n - 1))


def min_recursion_rhs(n: int, k: int, m_prev: Fraction, m_k: Fraction) -> Fraction:
    """Right side of m_k >= 1 + k/2n m_{k-1} + (2n-k)/2n m_k."""
    return 1 + Fraction(k, 2 * n) * m_prev + Fraction(2 * n - k, 2 * n) * m_k


def max_recursion_rhs(n: int, k: int, M_prev: Fraction, M_k: Fraction) -> Fraction:
    """Right side of M_k <= 2n - 2k + k/2n M_{k-1} + (2n-k)/2n M_k."""
    return 2 * n - 2 * k + Fraction(k, 2 * n) * M_prev + Fraction(2 * n - k, 2 * n) * M_k


def refined_recursion_rhs(n: int, k: int, Mr_prev: Fraction, Mr_prev2: Fraction) -> Fraction:
    """Upper bound on M^r_k from M^r_{k-1} and M^r_{k-2}, valid for k >= 3."""
    if k < 3:
        raise OutOfRangeError(f"refined recursion needs k >= 3, got {k}")
    const = Fraction(8 * n**3 + 4 * n**2 - 8 * k * n**2 + 10 * n * k - 3 * k, 4 * n * k - k * k)
    return (const + Fraction(4 * n - 2 * k + 1, 4 * n - k) * Mr_prev
            + Fraction(k - 1, 4 * n - k) * Mr_prev2)


# ---------------------------------------------------------------------------
# random moves and tier descent


def tier_to_lower_tier_probability(n: int, k: int) -> Fraction:
    _check_k(n, k)
    return Fraction(k, 2 * n)


def expected_random_moves(n: int, k: int) -> Fraction:
    """Mean number of random (r-deck) moves before absorption from tier k."""
    _check_k(n, k, lo=0)
    return 2 * n * harmonic(k)


@dataclass
class DescentReport:
    n: int
    checked: int = 0
    mismatches: list[tuple[Deck, Fraction]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_lower_tier_probability(n: int) -> DescentReport:
    """Exhaustively compare each r-deck's one-step mass into tier k-1 with k/2n."""
    report = DescentReport(n)
    for k, bucket in enumerate(tier_buckets(n)):
        if k == 0:
            continue
        for b in bucket:
            if not is_rdeck_bits(b):
                continue
            down = sum(c for s, c in insertion_counts(b, n).items() if tier_bits(s) == k - 1)
            mass = Fraction(down, 2 * n)
            report.checked += 1
            if mass != tier_to_lower_tier_probability(n, k):
                report.mismatches.append((Deck(n, b), mass))
    return report


# ---------------------------------------------------------------------------
# d + d' inequality


@dataclass
class DDViolation:
    deck: Deck
    successor: Deck
    d: int
    d_prime: int
    bound: int


@dataclass
class DDReport:
    n: int
    checked: int = 0
    violations: list[DDViolation] = field(default_factory=list)
    # bound - (d + d') over all checked pairs, split by successor tier
    max_slack_same: int | None = None
    min_slack_same: int | None = None
    max_slack_lower: int | None = None
    min_slack_lower: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def _chain_limit(n: int, k: int) -> int:
    return 2 * n - 2 * k - 1


def check_dd_inequality(n: int) -> DDReport:
    """Check d + d' against the chain-distance bounds for every deck of tier >= 1.

    For tier k >= 2: d + d' <= 2n-2k-1 if the successor stays in tier k and
    <= 2n-2k+2 if it drops to k-1.  Tier 1 gets only the longest-chain bounds
    on d and d' separately.  r-decks take part with d = 0.
    """
    if n < 3:
        raise OutOfRangeError(f"d+d' check needs n >= 3, got {n}")
    report = DDReport(n)
    alt = alternating_bits(n)
    for k, bucket in enumerate(tier_buckets(n)):
        if k == 0:
            continue
        succ_cache: dict[int, list[tuple[int, int, int]]] = {}
        for b in bucket:
            end, d = chain_end_bits(b, n)
            if end not in succ_cache:
                rows = []
                for s in insertion_counts(end, n):
                    if s == alt:
                        rows.append((s, 0, 0))
                    else:
                        rows.append((s, tier_bits(s), chain_end_bits(s, n)[1]))
                succ_cache[end] = rows
            for s, ks, dp in succ_cache[end]:
                report.checked += 1
                if k == 1:
                    ok = d <= _chain_limit(n, 1) and (s == alt or dp <= _chain_limit(n, ks))
                    if not ok:
                        report.violations.append(DDViolation(Deck(n, b), Deck(n, s), d, dp, _chain_limit(n, 1)))
                    continue
                same = ks == k
                bound = 2 * n - 2 * k - 1 if same else 2 * n - 2 * k + 2
                slack = bound - (d + dp)
                if same:
                    report.max_slack_same = slack if report.max_slack_same is None else max(report.max_slack_same, slack)
                    report.min_slack_same = slack if report.min_slack_same is None else min(report.min_slack_same, slack)
                else:
                    report.max_slack_lower = slack if report.max_slack_lower is None else max(report.max_slack_lower, slack)
                    report.min_slack_lower = slack if report.min_slack_lower is None else min(report.min_slack_lower, slack)
                if slack < 0:
                    report.violations.append(DDViolation(Deck(n, b), Deck(n, s), d, dp, bound))
    return report
