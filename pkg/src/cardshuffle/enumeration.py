"""Enumerate canonical decks, bucket them by tier, and count tiers in closed form."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator

from .deck import ChainInfo, Deck, chain_of, is_rdeck_bits, parse_deck, tier_bits
from .errors import OutOfRangeError, TooLargeError

MAX_ENUM_N = 14


def _check_n(n: int, ceiling: int = MAX_ENUM_N) -> None:
    if n < 1:
        raise OutOfRangeError(f"n must be >= 1, got {n}")
    if n > ceiling:
        raise TooLargeError(f"n={n} exceeds the enumeration ceiling {ceiling}")


def _check_tier(n: int, k: int, lo: int = 0) -> None:
    if not lo <= k <= n - 1:
        raise OutOfRangeError(f"tier k must be in [{lo}, {n - 1}] for n={n}, got {k}")


# ---------------------------------------------------------------------------
# ranking: a canonical deck is a choice of n one-positions among the low
# 2n-1 bits; rank is the colex rank of that combination


def rank_bits(bits: int, n: int) -> int:
    r = 0
    i = 0
    pos = 0
    while bits:
        if bits & 1:
            i += 1
            r += comb(pos, i)
        bits >>= 1
        pos += 1
    return r


def unrank_bits(rank: int, n: int) -> int:
    if not 0 <= rank < comb(2 * n - 1, n):
        raise OutOfRangeError(f"rank {rank} out of range for n={n}")
    bits = 0
    pos = 2 * n - 2
    for i in range(n, 0, -1):
        while comb(pos, i) > rank:
            pos -= 1
        rank -= comb(pos, i)
        bits |= 1 << pos
        pos -= 1
    return bits


def iter_bits(n: int) -> Iterator[int]:
    """All canonical packed decks in increasing (= colex rank) order."""
    limit = 1 << (2 * n - 1)
    v = (1 << n) - 1
    while v < limit:
        yield v
        # next word with the same popcount (Gosper)
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r


def deck_count(n: int) -> int:
    return comb(2 * n, n) // 2


def tier_buckets(n: int) -> list[list[int]]:
    """Packed decks grouped by tier, each bucket in lexicographic order."""
    _check_n(n)
    buckets: list[list[int]] = [[] for _ in range(n)]
    for b in iter_bits(n):
        buckets[tier_bits(b)].append(b)
    return buckets


def enumerate_decks(n: int) -> list[Deck]:
    """All C(2n,n)/2 canonical decks, ascending tier then lexicographic."""
    return [Deck(n, b) for bucket in tier_buckets(n) for b in bucket]


# ---------------------------------------------------------------------------
# closed forms


def tier_size_formula(n: int, k: int) -> int:
    _check_tier(n, k)
    return comb(n - 1, k) * comb(n, k)


def r_count_formula(n: int, k: int) -> int:
    _check_tier(n, k)
    return comb(n - 1, k) * comb(n - 1, k - 1) if k >= 1 else 0


def d_count_formula(n: int, k: int) -> int:
    # tier 0 holds only the absorbing deck, counted here as in the closed form
    _check_tier(n, k)
    return comb(n - 1, k) ** 2


# ---------------------------------------------------------------------------
# census


@dataclass
class TierRecord:
    k: int
    total: int
    r_count: int
    d_count: int
    chains: list[ChainInfo] = field(default_factory=list)

    @property
    def longest_chain_len(self) -> int:
        return max((c.length for c in self.chains), default=0)


@dataclass
class TierCensus:
    n: int
    tiers: list[TierRecord]

    def __getitem__(self, k: int) -> TierRecord:
        return self.tiers[k]

    @property
    def total(self) -> int:
        return sum(t.total for t in self.tiers)


def census(n: int) -> TierCensus:
    """Counts by brute enumeration plus every chain (one per r-deck) in each tier."""
    records = []
    for k, bucket in enumerate(tier_buckets(n)):
        r_decks = [b for b in bucket if is_rdeck_bits(b)]
        chains = [chain_of(Deck(n, b))[0] for b in r_decks]
        records.append(
            TierRecord(k=k, total=len(bucket), r_count=len(r_decks),
                       d_count=len(bucket) - len(r_decks), chains=chains)
        )
    return TierCensus(n, records)


def longest_chain_start(n: int, k: int) -> Deck:
    _check_tier(n, k, lo=1)
    head = ("01" * (n - k))[:-1]  # alternating, length 2n-2k-1
    return parse_deck(head + "0" * k + "1" * (k + 1))


def longest_chain(n: int, k: int) -> ChainInfo:
    """The unique chain of length 2n-2k in tier k."""
    chain, _ = chain_of(longest_chain_start(n, k))
    return chain
