"""Collects acceptance-criterion outcomes and prints one line per criterion."""
from __future__ import annotations

import pytest

_RESULTS: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    number, title = marker.args
    if rep.when == "call" or number not in _RESULTS:
        _RESULTS[number] = (title, "PASS" if rep.passed else "FAIL", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, seconds = _RESULTS[number]
        terminalreporter.write_line(f"AC{number:<2} {status}  {title} ({seconds:.1f}s)")
