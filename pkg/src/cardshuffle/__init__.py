"""Exact and simulated absorption times for the two-colour top-to-random shuffle."""

from .deck import Deck, DeckClass, classify, parse_deck, step_distribution, tier_of
from .errors import ShuffleError
from .formulas import bounds, tier1_lambda
from .montecarlo import SimConfig, SimResult, highest_tier_sweep, run_trials
from .solver import AbsorptionTable, TierStats, fundamental_solve, tier_solve, tier_stats

__all__ = [
    "AbsorptionTable", "Deck", "DeckClass", "ShuffleError", "SimConfig", "SimResult", "TierStats",
    "bounds", "classify", "fundamental_solve", "highest_tier_sweep", "parse_deck", "run_trials",
    "step_distribution", "tier1_lambda", "tier_of", "tier_solve", "tier_stats",
]
