from importlib import resources

import pytest

from rdp.formats import parse_pvs0_program, parse_trs

# One pass/fail line per acceptance criterion, shown after the test summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def _fixture_text(name: str) -> str:
    return resources.files("rdp").joinpath(f"fixtures/{name}").read_text()


@pytest.fixture(scope="session")
def ack_trs():
    return parse_trs(_fixture_text("ackermann.trs"))


@pytest.fixture(scope="session")
def ack_program():
    return parse_pvs0_program(_fixture_text("ackermann.pvs0.json"))


@pytest.fixture(scope="session")
def ack_trs_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("trs") / "ackermann.trs"
    path.write_text(_fixture_text("ackermann.trs"))
    return str(path)


@pytest.fixture(scope="session")
def ack_program_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("pvs0") / "ackermann.pvs0.json"
    path.write_text(_fixture_text("ackermann.pvs0.json"))
    return str(path)
