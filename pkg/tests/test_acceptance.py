"""One test per acceptance criterion; each prints its PASS/FAIL line.

The lines are also collected and repeated in the pytest terminal summary
(see conftest.py), so they show up without ``-s``.
"""

import subprocess
import sys
import time

import pytest

from colombeau import acceptance

SEED = 7
# wall-clock budgets in seconds, where the criterion states one
BUDGETS = {1: 5.0, 4: 10.0, 6: 2.0, 9: 30.0}
LINES = {}


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(number):
    start = time.perf_counter()
    result = acceptance.CRITERIA[number - 1](SEED)
    elapsed = time.perf_counter() - start
    budget = BUDGETS.get(number)
    timing = f"  [{elapsed:.2f} s" + (f" / budget {budget:g} s]" if budget else "]")
    line = result.line() + timing
    LINES[number] = line
    print(line)
    assert result.number == number
    assert result.passed, result.detail
    if budget is not None:
        assert elapsed < budget


def test_selftest_reports_are_byte_identical():
    cmd = [sys.executable, "-m", "colombeau.cli", "selftest", "--seed", str(SEED)]
    runs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE) for _ in range(2)]
    outs = [p.communicate() for p in runs]
    same = outs[0][0] == outs[1][0]
    line = f"10b {'PASS' if same else 'FAIL'}  selftest --seed {SEED} twice: byte-identical {same}"
    LINES[10.5] = line
    print(line)
    assert all(p.returncode == 0 for p in runs)
    assert same
    assert outs[0][0].decode().endswith("10/10 criteria passed\n")
