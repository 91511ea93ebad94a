import json
from pathlib import Path

import numpy as np
import pytest

from sscnet.datasets import example_network, example_network_dir

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


def random_codes(rng, rows, cols, weights=(0.5, 0.3, 0.2)):
    return rng.choice(3, size=(rows, cols), p=weights).astype(np.int8)


@pytest.fixture(scope="session")
def example_net():
    return example_network()


@pytest.fixture(scope="session")
def example_dir():
    return Path(str(example_network_dir()))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
