import numpy as np
import pytest

from bmom.regression import build_design, fit_regression

# filled by test_acceptance; printed at the end of the session
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def fixture_problem():
    """X = [(1,0), (1,1), (1,2)], y = (1, 2, 4)."""
    return build_design({"x": [0.0, 1.0, 2.0]}, [1.0, 2.0, 4.0], intercept=True)


@pytest.fixture
def fixture_fit(fixture_problem):
    return fit_regression(fixture_problem)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0][2:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
