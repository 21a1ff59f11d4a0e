"""Canonical decks, the move rule, and tier/chain structure.

A deck of ``2n`` cards is packed into a Python ``int`` whose binary
expansion, padded to ``2n`` digits, is exactly the deck string: card 1 (the
top of the deck) is bit ``2n - 1`` and card ``2n`` (the bottom) is bit 0.
So ``int("011010", 2)`` is the packed form of ``011010`` and integer order
coincides with lexicographic order on strings of equal length.

Decks are always kept in folded (canonical) form, i.e. with a leading 0.
Any operation that could produce a leading 1 flips every card before
returning.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .errors import (
    AbsorbingInputError,
    DeckError,
    InvalidCharacterError,
    NotADDeckError,
    NotTier1Error,
    OddLengthError,
    OutOfRangeError,
    UnbalancedError,
)

MAX_N = 64  # 2n <= 128 cards


class DeckClass(enum.Enum):
    ABSORBING = "absorbing"
    RDECK = "r"
    DDECK = "d"


# ---------------------------------------------------------------------------
# integer kernels (packed decks, no validation)


def full_mask(n: int) -> int:
    return (1 << (2 * n)) - 1


def alternating_bits(n: int) -> int:
    """Packed form of 0101...01."""
    return full_mask(n) // 3


def canonical_bits(bits: int, n: int) -> int:
    if bits >> (2 * n - 1):
        return bits ^ full_mask(n)
    return bits


def tier_bits(bits: int) -> int:
    """Number of adjacent ``11`` pairs."""
    return (bits & (bits >> 1)).bit_count()


def is_rdeck_bits(bits: int) -> bool:
    # canonical decks start with 0, so r-decks are exactly those ending in 0
    return not bits & 1


def rotate_bits(bits: int, n: int) -> int:
    """Top card to the bottom, then canonicalize."""
    w = 2 * n
    top = bits >> (w - 1)
    return canonical_bits(((bits << 1) & full_mask(n)) | top, n)


def insert_bits(bits: int, n: int, position: int) -> int:
    """Remove the top card and reinsert it so it becomes card ``position``.

    ``position`` runs over 1..2n; position 1 leaves the deck unchanged.
    """
    w = 2 * n
    top = bits >> (w - 1)
    rest = bits & (full_mask(n) >> 1)
    shift = w - position
    hi = rest >> shift
    lo = rest & ((1 << shift) - 1)
    return canonical_bits((hi << (shift + 1)) | (top << shift) | lo, n)


def insertion_counts(bits: int, n: int) -> dict[int, int]:
    """Successor -> number of the 2n insertion positions leading to it."""
    counts: dict[int, int] = {}
    for p in range(1, 2 * n + 1):
        s = insert_bits(bits, n, p)
        counts[s] = counts.get(s, 0) + 1
    return counts


def predecessor_bits(bits: int, n: int) -> int | None:
    """The unique d-deck whose deterministic move lands on ``bits``, if any."""
    if (bits ^ (bits >> 1)) & 1 == 0:
        return None
    w = 2 * n
    if bits & 1:
        prev = (bits >> 1) ^ (full_mask(n) >> 1)
    else:
        prev = bits >> 1
    prev &= (1 << (w - 1)) - 1
    if prev == alternating_bits(n):
        return None
    return prev


def bits_to_str(bits: int, n: int) -> str:
    return format(bits, f"0{2 * n}b")


# ---------------------------------------------------------------------------
# public value type


@dataclass(frozen=True, slots=True)
class Deck:
    """A canonical balanced deck. Build with :func:`parse_deck` or :meth:`from_bits`."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_N:
            raise OutOfRangeError(f"n must be in [1, {MAX_N}], got {self.n}")
        w = 2 * self.n
        if self.bits < 0 or self.bits >> w:
            raise DeckError(f"bits {self.bits:#x} do not fit in {w} cards")
        if self.bits >> (w - 1):
            raise DeckError(f"{self} starts with 1; use Deck.from_bits to fold it")
        if self.bits.bit_count() != self.n:
            raise UnbalancedError(f"{bits_to_str(self.bits, self.n)} is not balanced")

    @classmethod
    def from_bits(cls, bits: int, n: int) -> Deck:
        return cls(n, canonical_bits(bits, n))

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(int(c) for c in str(self))

    def __str__(self) -> str:
        return bits_to_str(self.bits, self.n)

    def __repr__(self) -> str:
        return f"Deck({self})"

    def sort_key(self) -> tuple[int, int]:
        """Canonical total order: ascending tier, then lexicographic."""
        return (tier_bits(self.bits), self.bits)

    def __lt__(self, other: Deck) -> bool:
        return self.sort_key() < other.sort_key()


def parse_deck(text: str) -> Deck:
    """Parse a 0/1 string, folding it (flipping colors) if it starts with 1.

    >>> parse_deck("110010")
    Deck(001101)
    """
    text = text.strip()
    if not text or any(c not in "01" for c in text):
        bad = sorted({c for c in text if c not in "01"}) or ["<empty>"]
        raise InvalidCharacterError(f"deck may contain only 0 and 1, found {bad!r}")
    if len(text) % 2:
        raise OddLengthError(f"deck length {len(text)} is odd")
    n = len(text) // 2
    if text.count("1") != n:
        raise UnbalancedError(f"{text} has {text.count('1')} ones, expected {n}")
    return Deck.from_bits(int(text, 2), n)


def absorbing_deck(n: int) -> Deck:
    return Deck(n, alternating_bits(n))


def classify(d: Deck) -> DeckClass:
    if d.bits == alternating_bits(d.n):
        return DeckClass.ABSORBING
    if is_rdeck_bits(d.bits):
        return DeckClass.RDECK
    return DeckClass.DDECK


def tier_of(d: Deck) -> int:
    return tier_bits(d.bits)


def deterministic_successor(d: Deck) -> Deck:
    if classify(d) is not DeckClass.DDECK:
        raise NotADDeckError(f"{d} is not a d-deck")
    return Deck(d.n, rotate_bits(d.bits, d.n))


def step_distribution(d: Deck) -> dict[Deck, Fraction]:
    """One-move transition probabilities, coinciding insertions aggregated."""
    cls = classify(d)
    if cls is DeckClass.ABSORBING:
        return {d: Fraction(1)}
    if cls is DeckClass.DDECK:
        return {Deck(d.n, rotate_bits(d.bits, d.n)): Fraction(1)}
    w = 2 * d.n
    return {
        Deck(d.n, s): Fraction(c, w)
        for s, c in sorted(insertion_counts(d.bits, d.n).items())
    }


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class ChainInfo:
    """A maximal run of probability-1 moves ending at an r-deck."""

    decks: tuple[Deck, ...]

    @property
    def length(self) -> int:
        return len(self.decks)

    @property
    def end(self) -> Deck:
        return self.decks[-1]

    @property
    def start(self) -> Deck:
        return self.decks[0]


def chain_end_bits(bits: int, n: int) -> tuple[int, int]:
    """(r-deck at the end of the chain through ``bits``, steps to reach it)."""
    dist = 0
    while bits & 1:
        bits = rotate_bits(bits, n)
        dist += 1
        if dist > 2 * n:
            raise AbsorbingInputError("deterministic walk did not reach an r-deck")
    return bits, dist


def chain_of(d: Deck) -> tuple[ChainInfo, int]:
    """The maximal chain containing ``d`` and the distance from ``d`` to its end."""
    n = d.n
    if d.bits == alternating_bits(n):
        raise AbsorbingInputError("the absorbing deck belongs to no chain")
    end, dist = chain_end_bits(d.bits, n)
    members = [end]
    cur = end
    while (prev := predecessor_bits(cur, n)) is not None:
        members.append(prev)
        cur = prev
    members.reverse()
    return ChainInfo(tuple(Deck(n, b) for b in members)), dist


# ---------------------------------------------------------------------------
# tier-1 naming


def _check_tier1_name(n: int, m: int, k: int) -> None:
    if not 1 <= m <= n - 1:
        raise OutOfRangeError(f"m must be in [1, {n - 1}], got {m}")
    if not 0 <= k <= 2 * n - 2 * m - 1:
        raise OutOfRangeError(f"k must be in [0, {2 * n - 2 * m - 1}], got {k}")


def tier1_string(n: int, m: int, k: int) -> str:
    _check_tier1_name(n, m, k)
    if k == 0:
        return "01" * m + "10" * (n - m)
    if k % 2:
        return "01" * ((k - 1) // 2) + "00" + "10" * (m - 1) + "11" + "01" * (n - m - (k + 1) // 2)
    return "01" * (k // 2 - 1) + "011" + "01" * (m - 1) + "001" + "01" * (n - m - k // 2 - 1)


def tier1_deck(n: int, m: int, k: int) -> Deck:
    """The tier-1 deck named ``[m, k]``."""
    return parse_deck(tier1_string(n, m, k))


def iter_tier1_names(n: int) -> Iterator[tuple[int, int]]:
    for m in range(1, n):
        for k in range(2 * n - 2 * m):
            yield m, k


@lru_cache(maxsize=64)
def _tier1_index(n: int) -> dict[int, tuple[int, int]]:
    return {int(tier1_string(n, m, k), 2): (m, k) for m, k in iter_tier1_names(n)}


def tier1_name(d: Deck) -> tuple[int, int]:
    """Inverse of :func:`tier1_deck`: returns ``(m, k)``."""
    if tier_of(d) != 1:
        raise NotTier1Error(f"{d} is in tier {tier_of(d)}, not tier 1")
    return _tier1_index(d.n)[d.bits]
