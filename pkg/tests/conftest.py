import pytest

from kerrnoise import SystemParams

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def fig3_point():
    """Symmetric couplings, eps = 2, F = 2, gamma = 1."""
    return SystemParams(epsilon=2.0, f_occ=2.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
