"""All 15 acceptance criteria at their full settings and stated tolerances."""

import os
import subprocess
import sys
import time

import pytest

from kp2lab.checks import CHECKS

from conftest import ACCEPTANCE_LINES

# criterion -> runtime bound in seconds
RUNTIME = {1: 10.0, 2: 30.0, 5: 5.0, 8: 300.0, 10: 60.0}
_cache: dict = {}


def _record(number, passed, text):
    line = f"[{'PASS' if passed else 'FAIL'}] {number:2d} {text}"
    ACCEPTANCE_LINES[number] = line
    print(line)


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    kw = {"_cache": _cache} if number in (10, 11) else {}
    t0 = time.perf_counter()
    result = CHECKS[number](**kw)
    elapsed = time.perf_counter() - t0
    bound = RUNTIME.get(number)
    fast = bound is None or elapsed < bound
    timing = f" [{elapsed:.1f} s < {bound:.0f} s]" if bound else ""
    _record(number, result.passed and fast, f"{result.name}: {result.detail}{timing}")
    assert result.passed, result.detail
    assert fast, f"runtime {elapsed:.1f} s exceeds {bound} s"


def _verify(out):
    env = dict(os.environ, KP2_OUTPUT_DIR=str(out))
    return subprocess.run([sys.executable, "-m", "kp2lab.cli", "verify"], env=env,
                          capture_output=True, text=True)


def test_criterion_15_hermetic_verify(tmp_path):
    t0 = time.perf_counter()
    runs = [_verify(tmp_path / name) for name in ("first", "second")]
    elapsed = (time.perf_counter() - t0) / 2
    reports = [(tmp_path / name / "verify.csv").read_bytes() for name in ("first", "second")]
    codes = [r.returncode for r in runs]
    identical = reports[0] == reports[1] and runs[0].stdout == runs[1].stdout
    ok = codes == [0, 0] and identical and elapsed < 600
    failed = [line.split()[1] for line in runs[0].stdout.splitlines() if line.startswith("[FAIL]")]
    _record(15, ok, f"hermetic verify: exit codes {codes}, reports identical {identical}, "
                    f"{elapsed:.1f} s per run, failing checks {failed or 'none'}")
    assert identical
    assert elapsed < 600
    assert codes == [0, 0], runs[0].stdout
