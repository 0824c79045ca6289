import numpy as np
import pytest

from platetrack.recognize import builtin_template_library


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in str(getattr(report, "nodeid", "")):
                name = report.nodeid.split("::")[-1]
                status = "PASS" if outcome == "passed" else "FAIL"
                lines.append((name, status))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, status in sorted(set(lines)):
            terminalreporter.write_line(f"ACCEPTANCE {name}: {status}")


@pytest.fixture(scope="session")
def template_library():
    return builtin_template_library()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
