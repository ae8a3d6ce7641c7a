import numpy as np
import pytest
from hypothesis import settings

from lde.lattice import ChainSpec

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def heis(L, boundary="open"):
    return ChainSpec("heisenberg_spin_half", L, boundary=boundary)


def aklt(L, boundary="periodic"):
    return ChainSpec("bilinear_biquadratic_spin1", L, 1.0 / 3.0, boundary)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
