import numpy as np
import pytest
from hypothesis import settings

from knowledge_growth import make_environment

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def interior_env():
    # all three types active at the true optimum, well away from the boundary
    return make_environment(3, [0.5, 0.3, 0.2], [2.0, 3.0, 6.0])


def dirichlet_instances(seed, count, m_lo, m_hi, y_lo=0.1, y_hi=10.0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        m = int(rng.integers(m_lo, m_hi + 1))
        p = rng.dirichlet(np.ones(m))
        y = np.exp(rng.uniform(np.log(y_lo), np.log(y_hi), size=m))
        yield p, y


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
