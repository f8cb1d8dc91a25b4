import functools

import pytest

from lprime.characters import get_character
from lprime.zerofinder import scan_l_zeros, scan_lprime_zeros

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def lprime_scan(q: int, index: int, T: float):
    return scan_lprime_zeros(get_character(q, index), T)


@functools.lru_cache(maxsize=None)
def l_scan(q: int, index: int, T: float):
    return scan_l_zeros(get_character(q, index), T)


@pytest.fixture(scope="session")
def scan3_30():
    return lprime_scan(3, 1, 30.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
