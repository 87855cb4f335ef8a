"""Shared test plumbing: the acceptance criterion result banner."""

import pytest

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(line: str) -> None:
    """Log one acceptance criterion verdict for the end-of-run banner."""
    print(line)
    _ACCEPTANCE_LINES.append(line)


@pytest.fixture(scope="session")
def criterion_log():
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
