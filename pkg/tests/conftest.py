import numpy as np
import pytest

from finslerlab.metrics import make_metric, zoo_list
from finslerlab.sampling import SampleSpec, draw_samples

ZOO_NAMES = [e.name for e in zoo_list()]
COMPLEX_NAMES = [e.name for e in zoo_list() if e.kind == "complex"]
REAL_NAMES = [e.name for e in zoo_list() if e.kind == "real"]
HOMOGENEOUS_COMPLEX = [n for n in COMPLEX_NAMES if n != "funk-complex-form"]


def samples_for(name, count, seed=0, **params):
    metric = make_metric(name, **params)
    return metric, draw_samples(metric, SampleSpec(seed=seed, count=count))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria register one line each; printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
