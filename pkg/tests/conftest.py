"""Shared pytest configuration.

Tests in test_acceptance.py are summarized at the end of the run as one
PASS/FAIL line per criterion (first docstring line = criterion label).
"""

import pytest

_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or item.fspath.basename != "test_acceptance.py":
        return
    doc = item.function.__doc__ or item.name
    label = doc.strip().splitlines()[0]
    _acceptance_results[label] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, status in _acceptance_results.items():
        terminalreporter.write_line(f"[ACCEPTANCE] {status} {label}")
