import numpy as np
import pytest

from brwsim import Constant, LatticeWindow, MediumSpec, Weibull, sample_medium


@pytest.fixture
def line():
    return LatticeWindow(1, 100)


def make_medium(w, sources, split=2.0, death=1.0, seed=1):
    lp = split if isinstance(split, (Constant, Weibull)) else Constant(split)
    lm = death if isinstance(death, (Constant, Weibull)) else Constant(death)
    return sample_medium(MediumSpec(sources, lp, lm), seed, w)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
