import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from nordengeom.generator import generate  # noqa: E402

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

# Filled by test_acceptance.py, printed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def kahler4():
    return generate("kahler", 4, 0)


@pytest.fixture(scope="session")
def w3_models():
    return [generate("w3", d, seed) for d in (4, 6) for seed in range(3)]


@pytest.fixture(scope="session")
def w3_4():
    return generate("w3", 4, 7)


@pytest.fixture(scope="session")
def random_models():
    return [generate("random", d, seed) for d in (4, 6) for seed in range(4)]
