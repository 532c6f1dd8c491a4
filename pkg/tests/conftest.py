"""Collects the acceptance-criterion verdicts and prints them after the run."""

import pytest

ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def record_criterion():
    def record(label: str, passed: bool, detail: str) -> None:
        line = f"CRITERION {label}: {'PASS' if passed else 'FAIL'} - {detail}"
        ACCEPTANCE[label] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
