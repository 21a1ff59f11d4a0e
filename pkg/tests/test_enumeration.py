from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cardshuffle.deck import Deck, classify, parse_deck, tier_of
from cardshuffle.enumeration import (
    census,
    d_count_formula,
    deck_count,
    enumerate_decks,
    iter_bits,
    longest_chain,
    r_count_formula,
    rank_bits,
    tier_buckets,
    tier_size_formula,
    unrank_bits,
)
from cardshuffle.errors import OutOfRangeError, TooLargeError


def test_small_enumerations():
    assert {str(d) for d in enumerate_decks(2)} == {"0101", "0110", "0011"}
    assert len(enumerate_decks(3)) == 10
    assert [str(d) for d in enumerate_decks(1)] == ["01"]


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_is_canonical_sorted_and_complete(n):
    decks = enumerate_decks(n)
    assert len(decks) == deck_count(n) == comb(2 * n, n) // 2
    assert decks == sorted(decks)
    assert len(set(decks)) == len(decks)
    # brute-force reference over all strings
    ref = {parse_deck(format(b, f"0{2 * n}b")) for b in range(1 << (2 * n)) if bin(b).count("1") == n}
    assert set(decks) == ref


@pytest.mark.parametrize("n", range(1, 11))
def test_rank_unrank_inverse(n):
    for r, b in enumerate(iter_bits(n)):
        assert rank_bits(b, n) == r
        assert unrank_bits(r, n) == b


@given(st.integers(1, 40), st.data())
def test_unrank_rank_large(n, data):
    r = data.draw(st.integers(0, comb(2 * n - 1, n) - 1))
    assert rank_bits(unrank_bits(r, n), n) == r


def test_too_large():
    with pytest.raises(TooLargeError):
        enumerate_decks(15)
    with pytest.raises(OutOfRangeError):
        enumerate_decks(0)


@pytest.mark.parametrize("n,k,total,r,d", [(3, 1, 6, 2, 4), (3, 2, 3, 2, 1), (5, 2, 60, 24, 36), (4, 3, 4, 3, 1), (6, 0, 1, 0, 1)])
def test_census_examples(n, k, total, r, d):
    rec = census(n)[k]
    assert (rec.total, rec.r_count, rec.d_count) == (total, r, d)
    assert (tier_size_formula(n, k), r_count_formula(n, k), d_count_formula(n, k)) == (total, r, d)


@pytest.mark.parametrize("n", range(1, 11))
def test_census_matches_closed_forms(n):
    c = census(n)
    assert c.total == comb(2 * n, n) // 2
    for rec in c.tiers:
        k = rec.k
        assert rec.total == rec.r_count + rec.d_count == comb(n - 1, k) * comb(n, k)
        assert rec.r_count == (comb(n - 1, k) * comb(n - 1, k - 1) if k else 0)
        assert rec.d_count == comb(n - 1, k) ** 2
        if k:
            assert rec.r_count * (n - k) == rec.d_count * k
            lengths = [ch.length for ch in rec.chains]
            assert lengths.count(2 * n - 2 * k) == 1 and max(lengths) == 2 * n - 2 * k
            assert sum(lengths) == rec.total


@pytest.mark.parametrize("n", range(1, 21))
def test_tier_sizes_sum_to_half_central_binomial(n):
    assert sum(comb(n - 1, k) * comb(n, k) for k in range(n)) == comb(2 * n, n) // 2
    assert sum(tier_size_formula(n, k) for k in range(n)) == comb(2 * n, n) // 2


def test_formula_range():
    with pytest.raises(OutOfRangeError):
        tier_size_formula(3, 3)
    with pytest.raises(OutOfRangeError):
        r_count_formula(3, -1)


@pytest.mark.parametrize("n,k,length,start", [(3, 1, 4, "010011"), (3, 2, 2, "000111"), (5, 2, 6, None)])
def test_longest_chain(n, k, length, start):
    ch = longest_chain(n, k)
    assert ch.length == length
    if start:
        assert str(ch.start) == start


@pytest.mark.parametrize("n", range(2, 9))
def test_tier_buckets_partition(n):
    buckets = tier_buckets(n)
    for k, bucket in enumerate(buckets):
        assert bucket == sorted(bucket)
        for b in bucket[:5]:
            d = Deck(n, b)
            assert tier_of(d) == k
    assert sum(map(len, buckets)) == deck_count(n)
    assert sum(classify(d).value == "r" for d in enumerate_decks(n)) == sum(r_count_formula(n, k) for k in range(n))
