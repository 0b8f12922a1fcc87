import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_AC_LINES: list[str] = []


@pytest.fixture
def ac_report():
    """Record one ``AC<n> PASS|FAIL`` line; printed in the terminal summary."""
    def report(label: str, ok: bool, detail: str):
        _AC_LINES.append(f"{label} {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if _AC_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_AC_LINES, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)
