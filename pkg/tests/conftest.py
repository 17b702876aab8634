import numpy as np
import pytest

from cmvkit import SchurParams


def random_disk(rng, n, radius=0.9):
    """n points uniformly distributed in the disk of the given radius."""
    return radius * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))


def random_params(rng, n, radius=0.9):
    return SchurParams(random_disk(rng, n, radius), np.exp(2j * np.pi * rng.uniform()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
