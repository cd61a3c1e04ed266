from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from plkdecomp.io import load_fixture

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def schmitz():
    return load_fixture("schmitz.crn")


@pytest.fixture(scope="session")
def schmitz_sub():
    return load_fixture("schmitz_sub.crn")


@pytest.fixture(scope="session")
def example4():
    return load_fixture("example4.crn")


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(test_acceptance.RESULTS):
        ok, detail = test_acceptance.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
