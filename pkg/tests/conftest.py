import sys
from fractions import Fraction

import pytest

from okounkov.wfield import WeightScalar

F = Fraction


def sqrt(D, c=1):
    return WeightScalar.sqrt(D, c)


@pytest.fixture
def s5():
    return WeightScalar.sqrt(5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for name in sorted(results, key=lambda n: int(n[1:])):
            terminalreporter.write_line(results[name])
