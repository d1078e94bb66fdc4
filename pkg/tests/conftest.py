"""Shared test plumbing: one visible line per acceptance criterion.

Acceptance tests report through the criterion_report fixture; the
collected lines are replayed in a terminal section after the run so the
per-criterion verdicts stay visible even with output capture on.
"""

import pytest

_criterion_lines: list[str] = []


def _record(number, passed: bool, detail: str) -> str:
    line = f"CRITERION {number} {'PASS' if passed else 'FAIL'}: {detail}"
    _criterion_lines.append(line)
    print(line)
    return line


@pytest.fixture(scope="session")
def criterion_report():
    return _record


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.line(line)
