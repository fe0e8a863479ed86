import pytest

from coriolis_orbits.rt4bp import MassTriple, analyze

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def equal_masses():
    return MassTriple.equal()


@pytest.fixture(scope="session")
def equal_analysis(equal_masses):
    return analyze(equal_masses)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
