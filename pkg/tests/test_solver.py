from fractions import Fraction

import pytest

from cardshuffle.deck import DeckClass, classify, deterministic_successor, parse_deck, step_distribution, tier_bits
from cardshuffle.errors import EmptyTierError, OutOfRangeError, TooLargeError
from cardshuffle.report import parse_csv, tierstats_table, to_csv
from cardshuffle.solver import (
    all_tier_stats,
    fundamental_matrix,
    fundamental_solve,
    tier_solve,
    tier_stats,
    transition_matrix,
    verify_balance,
)

from conftest import GOLDEN, oracle, solved

F = Fraction
D = parse_deck

TIER2_LCD = {3: 7, 4: 176148, 5: 18420324934572, 6: 438067323206466940220363196436798}


# --- transition matrix -------------------------------------------------------

def test_transition_matrix_n2():
    T = transition_matrix(2)
    assert [format(b, "04b") for b in T.states] == ["0101", "0011", "0110"]
    assert T.row("0110") == {D("0101"): F(1, 4), D("0011"): F(1, 2), D("0110"): F(1, 4)}
    assert T.dense()[T.index("0110")] == [F(1, 4), F(1, 2), F(1, 4)]


def test_transition_matrix_n3_row():
    T = transition_matrix(3)
    assert T.row("011100") == {D("010011"): F(1, 6), D("001011"): F(1, 6), D("000111"): F(1, 2), D("011100"): F(1, 6)}


@pytest.mark.parametrize("n", range(1, 7))
def test_transition_rows_stochastic_and_block_triangular(n):
    T = transition_matrix(n)
    assert T.row("01" * n) == {parse_deck("01" * n): 1}
    for i, row in enumerate(T.rows):
        assert sum(row.values()) == 1
        for j in row:
            assert tier_bits(T.states[j]) <= tier_bits(T.states[i])


def test_dense_limit():
    with pytest.raises(TooLargeError):
        transition_matrix(9).dense()


# --- fundamental route -------------------------------------------------------

def test_fundamental_n2():
    decks, N = fundamental_matrix(2, ["0110", "0011"])
    assert N == [[4, 2], [4, 3]]
    canon_decks, canon_N = fundamental_matrix(2)
    assert [str(d) for d in canon_decks] == ["0011", "0110"] and canon_N == [[3, 4], [2, 4]]
    t = fundamental_solve(2)
    assert t["0110"] == 6 and t["0011"] == 7 and t["0101"] == 0


def test_fundamental_row_sums_are_lambda():
    decks, N = fundamental_matrix(4)
    t = fundamental_solve(4)
    for d, row in zip(decks, N):
        assert sum(row) == t[d]


def test_fundamental_small_cases():
    assert fundamental_solve(1)["01"] == 0
    assert fundamental_solve(3)["011010"] == F(82, 7)
    with pytest.raises(TooLargeError):
        fundamental_solve(8)
    with pytest.raises(TooLargeError):
        fundamental_matrix(6)
    with pytest.raises(OutOfRangeError):
        fundamental_matrix(2, ["0110"])


# --- tier solve --------------------------------------------------------------

def test_tier_solve_examples():
    assert tier_stats(solved(4), 2).m_k == F(4600037, 176148)
    assert tier_stats(solved(5), 3).M_k_d == F(592868797469283916312231, 12684262385736134591112)


@pytest.mark.parametrize("n", range(1, 7))
def test_tier_solve_equals_oracle(n):
    assert solved(n) == oracle(n)
    assert len(solved(n)) == len(oracle(n))


@pytest.mark.parametrize("n", [6, 7])
def test_tier_stats_match_frozen_oracle(n):
    frozen = (GOLDEN / f"oracle_tierstats_n{n}.csv").read_text()
    got = to_csv(tierstats_table(all_tier_stats(solved(n))))
    assert got == frozen
    assert to_csv(parse_csv(frozen, "tierstats")) == frozen


def test_max_tier_and_limits():
    t = tier_solve(10, max_tier=1)
    assert t.max_tier == 1 and len(t) == 1 + 10 * 9
    with pytest.raises(EmptyTierError):
        tier_stats(t, 2)
    with pytest.raises(TooLargeError):
        tier_solve(13)
    with pytest.raises(OutOfRangeError):
        tier_solve(4, max_tier=4)
    with pytest.raises(OutOfRangeError):
        tier_stats(solved(3), 3)


@pytest.mark.parametrize("n", range(2, 8))
def test_table_invariants(n):
    t = solved(n)
    assert t["01" * n] == 0
    for d, v in t.items():
        if classify(d) is DeckClass.DDECK:
            assert v == t[deterministic_successor(d)] + 1
    rep = verify_balance(t)
    assert rep.ok and rep.checked == len(t) - 1


# --- tier statistics ---------------------------------------------------------

def test_tier_stats_n3_k2_ties_take_first_deck():
    s = tier_stats(solved(3), 2)
    assert s.M_k == F(120, 7) and str(s.argmax_deck) == "000111"
    assert s.M_k_r == F(120, 7) and str(s.argmax_r_deck) == "011100"


def test_tier_stats_examples():
    s = tier_stats(solved(4), 1)
    assert s.m_k == F(1222, 63) and str(s.argmin_deck) == "01101010"
    s2 = tier_stats(solved(2), 1)
    assert (s2.m_k, s2.M_k_r, s2.M_k, s2.common_denominator) == (6, 6, 7, 1)
    assert s2.tier_mean == F(13, 2)


@pytest.mark.parametrize("n", range(2, 8))
def test_tier_stats_invariants(n):
    for s in all_tier_stats(solved(n)):
        assert s.m_k <= s.tier_mean <= s.M_k
        assert s.M_k_r <= s.M_k and s.M_k_d <= s.M_k
        assert max(s.M_k_r, s.M_k_d) == s.M_k
        assert classify(s.argmin_deck) is DeckClass.RDECK
        assert classify(s.argmax_r_deck) is DeckClass.RDECK


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_tier1_common_denominator_is_4n2_minus_1(n):
    assert tier_stats(solved(n), 1).common_denominator == 4 * n * n - 1


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_tier2_common_denominators(n):
    assert tier_stats(solved(n), 2).common_denominator == TIER2_LCD[n]


# --- balance and fault injection ---------------------------------------------

def test_balance_flags_perturbed_deck_and_its_predecessors():
    t = solved(3)
    target = D("011010")
    bad = verify_balance(t.perturbed(target, 1))
    preds = {d for d, _ in t.items() if d != D("010101") and target in step_distribution(d)}
    assert set(bad.violations) == preds | {target}
    assert verify_balance(fundamental_solve(1)).ok
