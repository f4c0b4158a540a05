"""Acceptance criteria 1 to 11 at their stated tolerances.

Each criterion gets one test covering its checks. The few checks that fail
for mathematical reasons (see README) are split into their own tests so the
remaining checks of the same criterion still report cleanly.
"""
from functools import lru_cache

import pytest

from helixbif import checks

# (criterion, substring of the check name) run in dedicated tests below
ISOLATED = {
    5: "operator oracle agrees",
    6: "circle a=0 m=1: |R(0) - R*|",
    10: "cubic never identically zero",
}


@lru_cache(maxsize=None)
def results(k):
    if k == 11:
        return tuple(checks.criterion_11(include_verify=True))
    return tuple(checks.CRITERIA[k]())


def _report(k, acceptance_lines):
    found = results(k)
    acceptance_lines[k] = found
    for c in found:
        print(c.line())
    return found


@pytest.mark.parametrize("k", range(1, 12))
def test_criterion(k, acceptance_lines):
    found = _report(k, acceptance_lines)
    assert found
    skip = ISOLATED.get(k)
    failed = [c.line() for c in found if not c.passed and not (skip and skip in c.name)]
    assert not failed, "\n".join(failed)


def _isolated(k):
    match = [c for c in results(k) if ISOLATED[k] in c.name]
    assert len(match) == 1
    return match[0]


def test_criterion_5_operator_oracle_agreement(acceptance_lines):
    # the circle's mixed derivative lies in the range; the closed form says otherwise
    c = _isolated(5)
    print(c.line())
    assert c.passed, c.line()


def test_criterion_6_circle_intercept(acceptance_lines):
    # the circle branch drifts along a nearly degenerate direction
    c = _isolated(6)
    print(c.line())
    assert c.passed, c.line()


def test_criterion_10_cubic_never_zero(acceptance_lines):
    # the cubic vanishes identically at Omega = 1, and at Omega = -1 with a = 0
    c = _isolated(10)
    print(c.line())
    assert c.passed, c.line()
