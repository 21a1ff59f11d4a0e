"""Seeded simulation of the shuffle.

Random streams
--------------
Trial ``i`` of a run with master seed ``s`` owns an independent SplitMix64
stream whose initial state is ``mix64(mix64(s) + (i + 1) * GAMMA)`` (all
arithmetic mod 2**64).  Each random move draws one 64-bit output ``u`` and
inserts the top card at position ``1 + ((u >> 32) * 2n >> 32)``.  Because
every trial depends only on ``(s, i)``, results do not depend on how trials
are batched, and statistics are kept as exact integer sums.

Decks with 2n <= 64 cards run in a numba kernel; wider decks use the
pure-Python path, which implements the same stream and yields identical
counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .deck import (
    Deck,
    alternating_bits,
    insert_bits,
    is_rdeck_bits,
    parse_deck,
    rotate_bits,
    tier_bits,
)
from .errors import OutOfRangeError, ShuffleError, StepCapExceededError

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
KERNEL_MAX_N = 32


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial: int) -> int:
    return mix64((mix64(master_seed) + (trial + 1) * GAMMA) & MASK64)


class SplitMix64:
    """Minimal SplitMix64 generator; one instance per trial."""

    def __init__(self, state: int) -> None:
        self.state = state & MASK64

    @classmethod
    def for_trial(cls, master_seed: int, trial: int) -> SplitMix64:
        return cls(trial_seed(master_seed, trial))

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def insertion_position(self, width: int) -> int:
        return 1 + (((self.next_u64() >> 32) * width) >> 32)


class TierIncreaseError(ShuffleError, AssertionError):
    """A simulated move climbed a tier (debug check)."""


def run_trial(start: Deck, rng: SplitMix64, max_steps: int | None = None,
              check_tiers: bool = False) -> tuple[int, int]:
    """Play one game to absorption; returns (total moves, random moves)."""
    n = start.n
    alt = alternating_bits(n)
    w = 2 * n
    b = start.bits
    total = rnd = 0
    tier = tier_bits(b)
    while b != alt:
        if max_steps is not None and total >= max_steps:
            raise StepCapExceededError(f"{start} not absorbed after {max_steps} moves")
        if is_rdeck_bits(b):
            b = insert_bits(b, n, rng.insertion_position(w))
            rnd += 1
        else:
            b = rotate_bits(b, n)
        total += 1
        if check_tiers:
            t = tier_bits(b)
            if t > tier:
                raise TierIncreaseError(f"tier rose from {tier} to {t} at move {total}")
            tier = t
    return total, rnd


# ---------------------------------------------------------------------------
# numba kernel (2n <= 64)

_U = np.uint64


@njit(cache=True)
def _mix64_nb(z):
    z = (z ^ (z >> _U(30))) * _U(_M1)
    z = (z ^ (z >> _U(27))) * _U(_M2)
    return z ^ (z >> _U(31))


@njit(cache=True)
def _popcount_nb(x):
    c = 0
    while x:
        x &= x - _U(1)
        c += 1
    return c


@njit(cache=True)
def _trials_kernel(bits, n, master, first, count, max_steps, check_tiers):
    w = _U(2 * n)
    mask = _U(0xFFFFFFFFFFFFFFFF) >> (_U(64) - w)
    rest_mask = mask >> _U(1)
    alt = mask // _U(3)
    top_shift = w - _U(1)
    gamma = _U(GAMMA)
    seed_mix = _mix64_nb(master)
    totals = np.zeros(count, dtype=np.int64)
    randoms = np.zeros(count, dtype=np.int64)
    for t in range(count):
        state = _mix64_nb(seed_mix + _U(first + t + 1) * gamma)
        b = bits
        total = 0
        rnd = 0
        tier = _popcount_nb(b & (b >> _U(1)))
        while b != alt:
            if max_steps >= 0 and total >= max_steps:
                return totals, randoms, t, 1
            if b & _U(1):
                b = ((b << _U(1)) & mask) | (b >> top_shift)
            else:
                state += gamma
                u = _mix64_nb(state)
                p = _U(1) + (((u >> _U(32)) * w) >> _U(32))
                if p != _U(1):
                    shift = w - p
                    top = b >> top_shift
                    rest = b & rest_mask
                    hi = rest >> shift
                    lo = rest & ((_U(1) << shift) - _U(1))
                    b = (hi << (shift + _U(1))) | (top << shift) | lo
                rnd += 1
            if b >> top_shift:
                b ^= mask
            total += 1
            if check_tiers:
                tt = _popcount_nb(b & (b >> _U(1)))
                if tt > tier:
                    return totals, randoms, t, 2
                tier = tt
        totals[t] = total
        randoms[t] = rnd
    return totals, randoms, -1, 0


def trial_counts(start: Deck, master_seed: int, first: int, count: int,
                 max_steps: int | None = None, check_tiers: bool = False,
                 use_kernel: bool | None = None) -> tuple[list[int], list[int]]:
    """Per-trial (total, random) move counts for trials first..first+count-1."""
    if use_kernel is None:
        use_kernel = start.n <= KERNEL_MAX_N
    if use_kernel:
        if start.n > KERNEL_MAX_N:
            raise OutOfRangeError(f"kernel handles n <= {KERNEL_MAX_N}")
        totals, randoms, bad, status = _trials_kernel(
            np.uint64(start.bits), start.n, np.uint64(master_seed & MASK64), first, count,
            -1 if max_steps is None else max_steps, check_tiers)
        if status == 1:
            raise StepCapExceededError(f"{start} trial {first + bad} not absorbed after {max_steps} moves")
        if status == 2:
            raise TierIncreaseError(f"{start} trial {first + bad} climbed a tier")
        return totals.tolist(), randoms.tolist()
    tot, ran = [], []
    for i in range(first, first + count):
        a, r = run_trial(start, SplitMix64.for_trial(master_seed, i), max_steps, check_tiers)
        tot.append(a)
        ran.append(r)
    return tot, ran


# ---------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class SimConfig:
    start_deck: Deck
    trials: int
    master_seed: int = 0
    max_steps: int | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise OutOfRangeError(f"trials must be >= 1, got {self.trials}")

    @property
    def n(self) -> int:
        return self.start_deck.n


@dataclass(frozen=True)
class SimResult:
    """Exact integer sums over trials; merge two disjoint batches with ``+``."""

    config: SimConfig
    trials: int
    sum_moves: int
    sum_sq_moves: int
    min_moves: int
    max_moves: int
    sum_random: int
    sum_sq_random: int

    @classmethod
    def from_counts(cls, config: SimConfig, totals: list[int], randoms: list[int]) -> SimResult:
        return cls(config, len(totals), sum(totals), sum(t * t for t in totals),
                   min(totals), max(totals), sum(randoms), sum(r * r for r in randoms))

    def __add__(self, other: SimResult) -> SimResult:
        return SimResult(
            self.config, self.trials + other.trials,
            self.sum_moves + other.sum_moves, self.sum_sq_moves + other.sum_sq_moves,
            min(self.min_moves, other.min_moves), max(self.max_moves, other.max_moves),
            self.sum_random + other.sum_random, self.sum_sq_random + other.sum_sq_random,
        )

    @property
    def mean_exact(self) -> Fraction:
        return Fraction(self.sum_moves, self.trials)

    @property
    def mean_moves(self) -> float:
        return float(self.mean_exact)

    @property
    def mean_random_exact(self) -> Fraction:
        return Fraction(self.sum_random, self.trials)

    @property
    def mean_random_moves(self) -> float:
        return float(self.mean_random_exact)

    @staticmethod
    def _stddev(s: int, ss: int, t: int) -> float:
        if t < 2:
            return 0.0
        return math.sqrt(Fraction(t * ss - s * s, t * (t - 1)))

    @property
    def stddev(self) -> float:
        """Sample standard deviation of total moves."""
        return self._stddev(self.sum_moves, self.sum_sq_moves, self.trials)

    @property
    def stddev_random(self) -> float:
        return self._stddev(self.sum_random, self.sum_sq_random, self.trials)

    @property
    def stderr(self) -> float:
        return self.stddev / math.sqrt(self.trials)

    @property
    def stderr_random(self) -> float:
        return self.stddev_random / math.sqrt(self.trials)


def run_trials(cfg: SimConfig, batch_size: int | None = None,
               check_tiers: bool = False, use_kernel: bool | None = None) -> SimResult:
    """Run trials 0..trials-1, optionally in batches; the result is batch-independent."""
    step = batch_size or cfg.trials
    result: SimResult | None = None
    for first in range(0, cfg.trials, step):
        count = min(step, cfg.trials - first)
        tot, ran = trial_counts(cfg.start_deck, cfg.master_seed, first, count,
                                cfg.max_steps, check_tiers, use_kernel)
        part = SimResult.from_counts(cfg, tot, ran)
        result = part if result is None else result + part
    assert result is not None
    return result


# ---------------------------------------------------------------------------
# highest-tier sweep


def power_label(s: str) -> str:
    """Run-length label such as ``0^{25}1^{26}0`` for a deck string."""
    out = []
    i = 0
    while i < len(s):
        j = i
        while j < len(s) and s[j] == s[i]:
            j += 1
        run = j - i
        out.append(s[i] if run == 1 else f"{s[i]}^{{{run}}}")
        i = j
    return "".join(out)


@dataclass(frozen=True)
class SweepRow:
    label: str
    result: SimResult

    @property
    def deck(self) -> Deck:
        return self.result.config.start_deck


def derive_seed(master_seed: int, index: int) -> int:
    return mix64((master_seed + (index + 1) * GAMMA) & MASK64)


def highest_tier_decks(n: int) -> list[Deck]:
    """0^(n-j) 1^n 0^j for j = 0..n-1 (all of tier n-1)."""
    if n < 2:
        raise OutOfRangeError(f"sweep needs n >= 2, got {n}")
    return [parse_deck("0" * (n - j) + "1" * n + "0" * j) for j in range(n)]


def highest_tier_sweep(n: int, trials: int, seed: int = 0) -> list[SweepRow]:
    rows = []
    for j, deck in enumerate(highest_tier_decks(n)):
        cfg = SimConfig(deck, trials, derive_seed(seed, j))
        rows.append(SweepRow(power_label(str(deck)), run_trials(cfg)))
    return rows
