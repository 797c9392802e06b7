import os

import pytest
from hypothesis import HealthCheck, settings
from mpmath import mp

settings.register_profile(
    "default",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def _dps50():
    """Every test starts at 50 digits and cannot leak a changed precision."""
    old = mp.dps
    mp.dps = 50
    yield
    mp.dps = old


def close(a, b, tol):
    return abs(a - b) <= tol


@pytest.fixture(scope="session")
def schottky100_record():
    """A quick converged Schottky 100 degree record at 20 digits."""
    from flaremaass.cli import run_solve
    from flaremaass.records import RunConfig

    return run_solve(RunConfig(group="schottky", parameter="100", digits=20, s0="0.56"))


@pytest.fixture(scope="session")
def hecke035_record():
    """A converged Hecke r = 0.35 record at 30 digits."""
    from flaremaass.cli import run_solve
    from flaremaass.records import RunConfig

    return run_solve(RunConfig(group="hecke", parameter="0.35", digits=30, s0="0.765",
                               spread0="0.005"))


# acceptance criteria append (number, passed, detail) here; printed at the end
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
