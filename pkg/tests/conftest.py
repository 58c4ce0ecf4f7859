import sys

import pyparsing
import pytest

from tmkit import fixtures

# pydot's grammar backtracks heavily; memoising makes the DOT checks ~4x faster
pyparsing.ParserElement.enable_packrat()


@pytest.fixture(scope="session")
def docs():
    return {name: fixtures.load(name) for name in fixtures.NAMES}


@pytest.fixture(scope="session")
def factory(docs):
    return docs["smart_factory"]


@pytest.fixture(scope="session")
def broker(docs):
    return docs["loan_broker"]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l[6:8])):
            terminalreporter.write_line(line)
