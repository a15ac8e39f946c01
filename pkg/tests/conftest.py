import numpy as np
import pytest

from tricell import Box, PhaseSpace

ACCEPTANCE_LINES: list[str] = []


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="also run the optional hours-long reproductions")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="optional long reproduction; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_phase(N, rho, seed=0):
    L = (N / rho) ** (1.0 / 3.0)
    box = Box.cubic(L)
    rng = np.random.default_rng(seed)
    return PhaseSpace(rng.random((N, 3)) * L, None, box)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
