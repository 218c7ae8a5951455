import numpy as np
import pytest

from opineq.rng import stream


@pytest.fixture
def g(request):
    """Per-test deterministic generator keyed by the test name."""
    return stream(20240917, request.node.name)


def rel(X, Y):
    return float(np.linalg.norm(np.asarray(X) - np.asarray(Y)) / max(np.linalg.norm(Y), 1e-300))


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
