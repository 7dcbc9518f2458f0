import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, text = marker.args
        _criteria.append((number, text, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    merged = {}
    for number, text, outcome, duration in _criteria:
        ok, total = merged.get((number, text), (True, 0.0))
        merged[(number, text)] = (ok and outcome == "passed", total + duration)
    for (number, text), (ok, total) in sorted(merged.items()):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {text} ({total:.2f}s)")


@pytest.fixture(scope="session")
def validated_oracle():
    from psi_point import oracle_selfcheck

    report = oracle_selfcheck()
    assert report.ok, report.mismatches
    return report
