import pytest

from plusspace.base_field import make_field


@pytest.fixture(scope="session")
def F10():
    return make_field(40)


@pytest.fixture(scope="session")
def Q():
    return make_field(0)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance
    lines = test_acceptance.RESULTS
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
