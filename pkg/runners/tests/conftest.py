from __future__ import annotations

import sys


def pytest_runtest_logreport(report):
    """One visible pass/fail line per real-runtime criterion."""
    if report.when != "call" or "test_real_sessions" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    verdict = "PASS" if report.passed else "FAIL"
    print(f"[acceptance:real] {name}: {verdict}", file=sys.stderr)
