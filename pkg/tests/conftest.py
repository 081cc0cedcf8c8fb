import pytest

from qpu.forms import DiagonalForm, parse_form
from qpu.local import load_genera


@pytest.fixture(scope="session")
def genera():
    return load_genera()


@pytest.fixture(scope="session")
def g1_23514():
    return parse_form("[[1,0,0],[0,10,4],[0,4,10]]")


@pytest.fixture(scope="session")
def g2_237():
    return parse_form("[[2,1,1],[1,3,1],[1,1,9]]")


def D(*c):
    return DiagonalForm.of(*c)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
