"""Acceptance suite: one test per criterion, each at its stated bound.

Run directly (python tests/test_acceptance.py) or through pytest; either way
one PASS/FAIL line per criterion is printed.
"""

import sys

import pytest

from qpu.checks import CHECKS

RESULTS: dict[int, str] = {}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    res = CHECKS[number]()
    line = res.line()
    RESULTS[number] = line
    print(line)
    assert res.ok, line


if __name__ == "__main__":
    ok = True
    for n in sorted(CHECKS):
        res = CHECKS[n]()
        print(res.line(), flush=True)
        ok &= res.ok
    sys.exit(0 if ok else 1)
