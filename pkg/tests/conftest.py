import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mfrl import HurstField  # noqa: E402


@pytest.fixture
def brownian2():
    return HurstField.constant(0.5, d=2)


@pytest.fixture
def sin1():
    return HurstField.sinusoidal(0.5, 0.2, 1.0, d=1)


@pytest.fixture
def sin2():
    return HurstField.sinusoidal(0.5, 0.2, 1.0, d=2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
