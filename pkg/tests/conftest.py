import pytest

from suq2calc.conventions import validated_calculus
from suq2calc.forms import build_sigma_algebra


@pytest.fixture(scope="session")
def calc():
    return validated_calculus()


@pytest.fixture(scope="session")
def alg(calc):
    return build_sigma_algebra(4, calc)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = {}
    for outcome in ("passed", "failed", "xfailed", "xpassed", "error"):
        for rep in terminalreporter.stats.get(outcome, ()):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            if outcome == "xfailed" or rep.when == "call" or outcome == "error":
                name = nodeid.split("::")[-1][len("test_criterion_"):]
                verdict = "PASS" if outcome == "passed" else "FAIL"
                note = " (known unattainable, strict xfail)" if outcome == "xfailed" else ""
                lines[name] = f"criterion {int(name[:2]):2d} {name[3:]}: {verdict}{note}"
    if lines:
        terminalreporter.section("acceptance criteria")
        for name in sorted(lines):
            terminalreporter.write_line(lines[name])
