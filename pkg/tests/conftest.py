import pytest

from keanelab.keane import generate

_acceptance = []


@pytest.fixture(scope="session")
def minimal():
    return generate("minimal", 7)


@pytest.fixture(scope="session")
def theorem4():
    return generate("theorem4", 5)


@pytest.fixture(scope="session")
def theorem3():
    return generate("theorem3", 7, r=2)


@pytest.fixture(scope="session")
def corollary1():
    return generate("corollary1", 5)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
