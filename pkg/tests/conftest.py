import pytest

from cntrap.casimir import CPInterpolant
from cntrap.material import NanotubeResponse, NanotubeSpec
from cntrap.trap import AtomSpec

# lines recorded by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def spec():
    return NanotubeSpec()


@pytest.fixture(scope="session")
def response(spec):
    return NanotubeResponse(spec, "calibrated")


@pytest.fixture(scope="session")
def atom():
    return AtomSpec.rb87()


@pytest.fixture(scope="session")
def cp_interp(response, atom):
    cp = CPInterpolant(response, atom)
    cp(1e-7)
    return cp


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
