"""Acceptance criteria A1-A13, one test and one summary line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py`` (prints the same lines).
"""
import sys

import pytest

from okounkov.acceptance import CHECKS, check_a1, run_check

RESULTS = {}


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name):
    r = run_check(name)
    RESULTS[name] = r.line()
    print(r.line())
    assert r.passed, r.line()


def test_a1_detects_wrong_recurrence():
    # d_{n+1} = d_n + d_{n-1} (Fibonacci) instead of 3 d_n - d_{n-1}
    def fib(n):
        a, b = 1, 1
        for _ in range(n):
            a, b = b, a + b
        return a
    ok, detail = check_a1(d=fib)
    assert not ok, detail


if __name__ == "__main__":
    bad = 0
    for name in CHECKS:
        r = run_check(name)
        print(r.line(), flush=True)
        bad += not r.passed
    sys.exit(1 if bad else 0)
