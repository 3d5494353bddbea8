import pytest

from helpers import ACCEPTANCE_LINES, catalog_context


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def hc_factory():
    return catalog_context
