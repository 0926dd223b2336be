"""Acceptance gate: every criterion at its stated tolerance, one line each.

Runs the same criterion functions as ``pseudohyp verify`` at the default
configuration (n = 2, resolution 801, seed 1234) and fails the suite if any
check misses its tolerance.
"""

import numpy as np
import pytest

from pseudohyp.verify import CRITERIA, Config, run_criteria

CFG = Config()

_RESULTS = {}


def _run(name):
    if name not in _RESULTS:
        _RESULTS[name] = run_criteria(CFG, [name], echo=False)[0]
    return _RESULTS[name]


def _assert_criterion(name):
    slot = _run(name)
    lines = []
    for c in slot["checks"]:
        state = "pass" if c["passed"] else "FAIL"
        lines.append(f"  [{state}] {c['name']}: measured {c['measured']:.6g}"
                     f" target {c['target']:.6g} tol {c['tolerance']:.6g}")
    header = f"[{'PASS' if slot['passed'] else 'FAIL'}] {name}"
    print("\n".join([header] + lines))
    assert slot["passed"], "\n".join([header] + lines)


@pytest.mark.parametrize("name", [n for n, _ in CRITERIA])
def test_acceptance_criterion(name):
    _assert_criterion(name)


def test_all_criteria_present():
    assert len(CRITERIA) == 13
    names = [n for n, _ in CRITERIA]
    assert names[0] == "barbot_maximality_flatness"
    assert "determinism" in names
