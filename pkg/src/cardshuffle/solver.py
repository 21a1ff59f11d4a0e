"""Exact expected absorption times over the rationals.

Two routes compute the same table:

* :func:`fundamental_solve` builds ``I - Q`` over every transient deck and
  solves ``(I - Q) x = 1`` with FLINT.  It is the reference oracle and only
  runs for small ``n``.
* :func:`tier_solve` walks the tiers upward.  Inside tier ``k`` the only
  unknowns are the r-decks; a d-deck's value is its chain end's value plus
  the number of deterministic steps.  Lower-tier values are already known,
  so each tier is one small exact system solved by :mod:`cardshuffle.linalg`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import flint

from .deck import (
    Deck,
    DeckClass,
    alternating_bits,
    chain_end_bits,
    classify,
    insertion_counts,
    is_rdeck_bits,
    parse_deck,
    rotate_bits,
    tier_bits,
)
from .enumeration import _check_n, tier_buckets
from .errors import EmptyTierError, OutOfRangeError, SingularMatrixError, TooLargeError
from .linalg import solve_rational_rhs

FUNDAMENTAL_MAX_N = 7
FUNDAMENTAL_MATRIX_MAX_N = 5
DENSE_MAX_N = 8
TIER_SOLVE_MAX_N = 12


def _successors(bits: int, n: int) -> dict[int, int]:
    """Successor -> count out of 2n (d-decks put all 2n on one successor)."""
    if is_rdeck_bits(bits):
        return insertion_counts(bits, n)
    return {rotate_bits(bits, n): 2 * n}


# ---------------------------------------------------------------------------
# transition matrix


@dataclass(frozen=True)
class TransitionMatrix:
    """Sparse rows over the canonical state order (absorbing deck first)."""

    n: int
    states: tuple[int, ...]
    rows: tuple[dict[int, Fraction], ...]

    def index(self, deck: Deck | str) -> int:
        d = parse_deck(deck) if isinstance(deck, str) else deck
        return self.states.index(d.bits)

    def row(self, deck: Deck | str) -> dict[Deck, Fraction]:
        i = self.index(deck)
        return {Deck(self.n, self.states[j]): p for j, p in self.rows[i].items()}

    def dense(self) -> list[list[Fraction]]:
        if self.n > DENSE_MAX_N:
            raise TooLargeError(f"dense transition matrix limited to n <= {DENSE_MAX_N}")
        size = len(self.states)
        out = [[Fraction(0)] * size for _ in range(size)]
        for i, row in enumerate(self.rows):
            for j, p in row.items():
                out[i][j] = p
        return out


def canonical_order(n: int) -> list[int]:
    return [b for bucket in tier_buckets(n) for b in bucket]


def transition_matrix(n: int) -> TransitionMatrix:
    _check_n(n, TIER_SOLVE_MAX_N)
    order = canonical_order(n)
    idx = {b: i for i, b in enumerate(order)}
    alt = alternating_bits(n)
    rows = []
    for b in order:
        if b == alt:
            rows.append({idx[b]: Fraction(1)})
            continue
        rows.append({idx[s]: Fraction(c, 2 * n) for s, c in sorted(_successors(b, n).items(), key=lambda t: idx[t[0]])})
    return TransitionMatrix(n, tuple(order), tuple(rows))


# ---------------------------------------------------------------------------
# absorption table


@dataclass(frozen=True)
class AbsorptionTable:
    """Exact expected number of moves to absorption per canonical deck.

    Holds every deck of tiers ``0..max_tier``.
    """

    n: int
    values: Mapping[int, Fraction]
    max_tier: int

    def __getitem__(self, deck: Deck | str) -> Fraction:
        d = parse_deck(deck) if isinstance(deck, str) else deck
        return self.values[d.bits]

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, deck: object) -> bool:
        if isinstance(deck, str):
            deck = parse_deck(deck)
        return isinstance(deck, Deck) and deck.bits in self.values

    def decks(self) -> list[Deck]:
        return sorted(Deck(self.n, b) for b in self.values)

    def items(self) -> Iterator[tuple[Deck, Fraction]]:
        for d in self.decks():
            yield d, self.values[d.bits]

    def tier(self, k: int) -> list[tuple[Deck, Fraction]]:
        """Decks of tier ``k`` in lexicographic order with their values."""
        return [(Deck(self.n, b), v) for b, v in sorted(self.values.items()) if tier_bits(b) == k]

    def perturbed(self, deck: Deck | str, delta: Fraction | int) -> AbsorptionTable:
        """Copy with one value shifted; used for fault injection."""
        d = parse_deck(deck) if isinstance(deck, str) else deck
        vals = dict(self.values)
        vals[d.bits] += delta
        return AbsorptionTable(self.n, vals, self.max_tier)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AbsorptionTable):
            return NotImplemented
        return self.n == other.n and dict(self.values) == dict(other.values)


def fundamental_matrix(n: int, order: Sequence[Deck | str] | None = None) -> tuple[list[Deck], list[list[Fraction]]]:
    """Transient decks and N = (I - Q)^-1 over them.

    Rows and columns follow the canonical order unless ``order`` lists the
    transient decks in some other arrangement.
    """
    if n > FUNDAMENTAL_MATRIX_MAX_N:
        raise TooLargeError(f"explicit fundamental matrix limited to n <= {FUNDAMENTAL_MATRIX_MAX_N}")
    states, A = _i_minus_q_scaled(n)
    if not states:
        return [], []
    inv = (flint.fmpq_mat(A) / (2 * n)).inv()
    size = len(states)
    perm = list(range(size))
    if order is not None:
        pos = {b: i for i, b in enumerate(states)}
        wanted = [(parse_deck(d) if isinstance(d, str) else d).bits for d in order]
        if sorted(wanted) != sorted(states):
            raise OutOfRangeError("order must list every transient deck exactly once")
        perm = [pos[b] for b in wanted]
    N = [[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in perm] for i in perm]
    return [Deck(n, states[i]) for i in perm], N


def _i_minus_q_scaled(n: int) -> tuple[list[int], list[list[int]]]:
    """Transient states and the integer matrix 2n (I - Q)."""
    order = canonical_order(n)[1:]
    idx = {b: i for i, b in enumerate(order)}
    size = len(order)
    A = [[0] * size for _ in range(size)]
    for b in order:
        i = idx[b]
        A[i][i] += 2 * n
        for s, c in _successors(b, n).items():
            if s in idx:
                A[i][idx[s]] -= c
    return order, A


def fundamental_solve(n: int) -> AbsorptionTable:
    """lambda = (I - Q)^-1 1 over all transient decks (oracle route)."""
    _check_n(n, FUNDAMENTAL_MAX_N)
    states, A = _i_minus_q_scaled(n)
    values = {alternating_bits(n): Fraction(0)}
    if states:
        try:
            X = flint.fmpz_mat(A).solve(flint.fmpz_mat([[2 * n]] * len(states)))
        except ZeroDivisionError as exc:  # pragma: no cover - would be a bug
            raise SingularMatrixError(str(exc)) from exc
        for i, b in enumerate(states):
            q = X[i, 0]
            values[b] = Fraction(int(q.p), int(q.q))
    return AbsorptionTable(n, values, n - 1)


def tier_solve(n: int, max_tier: int | None = None) -> AbsorptionTable:
    """Tier-by-tier exact solve; ``max_tier`` stops early (tiers 0..max_tier)."""
    _check_n(n, TIER_SOLVE_MAX_N)
    top = n - 1 if max_tier is None else max_tier
    if not 0 <= top <= n - 1:
        raise OutOfRangeError(f"max_tier must be in [0, {n - 1}], got {max_tier}")
    w = 2 * n
    buckets = tier_buckets(n)
    lam: dict[int, Fraction] = {alternating_bits(n): Fraction(0)}
    for k in range(1, top + 1):
        bucket = buckets[k]
        rdecks = [b for b in bucket if is_rdeck_bits(b)]
        index = {b: i for i, b in enumerate(rdecks)}
        ends: dict[int, tuple[int, int]] = {}

        def resolve(b: int) -> tuple[int, int]:
            if b not in ends:
                ends[b] = chain_end_bits(b, n)
            return ends[b]

        size = len(rdecks)
        A = [[0] * size for _ in range(size)]
        rhs = []
        for i, r in enumerate(rdecks):
            row = A[i]
            row[i] += w
            const = w
            lower = Fraction(0)
            for s, c in insertion_counts(r, n).items():
                if tier_bits(s) == k:
                    e, dist = resolve(s)
                    row[index[e]] -= c
                    const += c * dist
                else:
                    lower += c * lam[s]
            rhs.append(const + lower)
        x = solve_rational_rhs(A, rhs)
        for b in bucket:
            e, dist = resolve(b)
            lam[b] = x[index[e]] + dist
    return AbsorptionTable(n, lam, top)


# ---------------------------------------------------------------------------
# per-tier statistics


@dataclass(frozen=True)
class TierStats:
    """Summary of one tier. ``M_k_d`` is the maximum over d-decks only."""

    n: int
    k: int
    m_k: Fraction
    M_k: Fraction
    M_k_r: Fraction
    argmin_deck: Deck
    argmax_deck: Deck
    argmax_r_deck: Deck
    tier_mean: Fraction
    common_denominator: int
    M_k_d: Fraction
    argmax_d_deck: Deck


def tier_stats(table: AbsorptionTable, k: int) -> TierStats:
    """Extremes, achievers (first in canonical order on ties), mean and LCD of tier k."""
    n = table.n
    if not 1 <= k <= n - 1:
        raise OutOfRangeError(f"k must be in [1, {n - 1}], got {k}")
    entries = table.tier(k)
    if not entries:
        raise EmptyTierError(f"table holds no decks of tier {k} (max_tier={table.max_tier})")
    rentries = [(d, v) for d, v in entries if classify(d) is DeckClass.RDECK]
    dentries = [(d, v) for d, v in entries if classify(d) is DeckClass.DDECK]
    lo = min(entries, key=lambda t: t[1])
    hi = max(entries, key=lambda t: t[1])
    hir = max(rentries, key=lambda t: t[1])
    hid = max(dentries, key=lambda t: t[1])
    mean = sum((v for _, v in entries), Fraction(0)) / len(entries)
    lcd = math.lcm(*(v.denominator for _, v in entries))
    return TierStats(n, k, lo[1], hi[1], hir[1], lo[0], hi[0], hir[0], mean, lcd, hid[1], hid[0])


def all_tier_stats(table: AbsorptionTable) -> list[TierStats]:
    return [tier_stats(table, k) for k in range(1, table.max_tier + 1)]


# ---------------------------------------------------------------------------
# balance check


@dataclass
class BalanceReport:
    n: int
    checked: int
    violations: list[Deck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_balance(table: AbsorptionTable) -> BalanceReport:
    """Check lambda_D = 1 + sum_D' P(D, D') lambda_D' exactly for every transient deck."""
    n = table.n
    alt = alternating_bits(n)
    report = BalanceReport(n, 0)
    vals = table.values
    if vals.get(alt, Fraction(0)) != 0:
        report.violations.append(Deck(n, alt))
    for b in sorted(vals, key=lambda x: (tier_bits(x), x)):
        if b == alt:
            continue
        succ = _successors(b, n)
        rhs = 1 + sum((Fraction(c, 2 * n) * vals[s] for s, c in succ.items()), Fraction(0))
        report.checked += 1
        if rhs != vals[b]:
            report.violations.append(Deck(n, b))
    return report
