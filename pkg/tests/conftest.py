import numpy as np
import pytest

from gmatrix.space import build_space


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def circle128():
    return build_space("circle", 128)


@pytest.fixture(scope="session")
def circle256():
    return build_space("circle", 256)


@pytest.fixture(scope="session")
def interval200():
    return build_space("interval", 200)


@pytest.fixture
def two_point():
    return build_space("finite", params={"weights": [0.5, 0.5], "metric": [[0, 1], [1, 0]]})


@pytest.fixture
def three_point():
    return build_space("finite", params={"weights": [0.2, 0.3, 0.5]})


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
