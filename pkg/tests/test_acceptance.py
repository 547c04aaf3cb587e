"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import subprocess
import sys

import pytest

from heightmu import suite

RESULTS = []


def record(number, check):
    line = f"criterion {number:2d} {check.line()}"
    RESULTS.append(line)
    print(line)
    print("    ", check.measured)
    return check.passed


@pytest.mark.parametrize("number, key", [(i + 1, key) for i, (key, _) in enumerate(suite.CHECKS)],
                         ids=[key for key, _ in suite.CHECKS])
def test_criterion(number, key):
    fn = dict(suite.CHECKS)[key]
    assert record(number, fn(0))


def test_criterion_10_determinism():
    cmd = [sys.executable, "-m", "heightmu.cli", "verify", "--seed", "0"]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    ok = first.returncode == 0 and first.stdout == second.stdout and first.stdout
    assert record(10, suite.Check("verify --seed 0 twice gives byte-identical reports", bool(ok),
                                  {"exit_codes": [first.returncode, second.returncode],
                                   "bytes": len(first.stdout)}))
