import pytest

from frobcheck.potential import fixture_text, parse_potential


@pytest.fixture(scope="session")
def e8a1():
    return parse_potential(fixture_text("e8a1"))


@pytest.fixture(scope="session")
def e8a1_text():
    return fixture_text("e8a1")


@pytest.fixture(scope="session")
def a3():
    return parse_potential(fixture_text("a3-poly"))


@pytest.fixture(scope="session")
def cubic():
    return parse_potential(fixture_text("cubic-trivial"))


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
