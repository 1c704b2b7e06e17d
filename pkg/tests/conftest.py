from fractions import Fraction

import pytest

from unionbound.model import Instance

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report(capsys):
    """Print and keep one PASS/FAIL line per acceptance criterion."""

    def report(number, title, ok, elapsed, budget, detail=""):
        status = "PASS" if ok and elapsed < budget else "FAIL"
        line = f"{status} criterion {number}: {title} ({elapsed:.2f} s of {budget:g} s)"
        if detail:
            line += f" {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return status == "PASS"

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def sym3():
    return Instance.symmetric(3, 0.5, 0.25)


@pytest.fixture
def sym3_exact():
    return Instance.symmetric(3, Fraction(1, 2), Fraction(1, 4))


@pytest.fixture
def two():
    return Instance(2, (0.5, 0.5), {(0, 1): 0.25})
