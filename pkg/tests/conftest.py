import os
import sys

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
if HERE not in sys.path:
    sys.path.insert(0, HERE)

CORPUS = os.path.join(HERE, "corpus")
GOLDEN = os.path.join(HERE, "golden")

_criteria: dict = {}


@pytest.fixture(scope="session")
def criteria():
    """Acceptance tests record ``n -> (passed, detail)`` here for the summary."""
    return _criteria


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, detail = _criteria[n]
        terminalreporter.write_line(f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")
