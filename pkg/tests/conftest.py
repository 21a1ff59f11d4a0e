from functools import lru_cache
from pathlib import Path

import pytest

from cardshuffle.solver import fundamental_solve, tier_solve

GOLDEN = Path(__file__).parent / "golden"


@lru_cache(maxsize=None)
def solved(n: int):
    return tier_solve(n)


@lru_cache(maxsize=None)
def oracle(n: int):
    return fundamental_solve(n)


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
