import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion's outcome for the terminal summary."""

    def record(label, passed, detail=""):
        _ACCEPTANCE[label] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[label]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}{': ' + detail if detail else ''}")
