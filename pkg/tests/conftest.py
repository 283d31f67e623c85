from pathlib import Path

import pytest

from datr.parser import parse_theory

FIXTURES = Path(__file__).parent / "fixtures"
VERBS = FIXTURES / "verbs.dtr"
VERB_GOALS = FIXTURES / "verbs.dtg"


@pytest.fixture(scope="session")
def verbs():
    theory, diags = parse_theory(VERBS.read_text())
    assert diags == []
    return theory


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
