import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hqea.knapsack import KnapsackInstance  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny():
    """weights [2,3,4], profits [3,4,5], capacity 5; optimum 7."""
    return KnapsackInstance(np.array([2, 3, 4]), np.array([3, 4, 5]), 5, "tiny")


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, text = mark.args
    if call.when == "setup" and call.excinfo is not None:
        _criteria[number] = ("ERROR", text)
    elif call.when == "call":
        _criteria[number] = ("FAIL" if call.excinfo is not None else "PASS", text)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, text = _criteria[number]
        terminalreporter.write_line(f"[{status}] C{number}: {text}")
