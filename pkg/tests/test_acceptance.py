"""Acceptance gate: runs every criterion and prints one line per result.

Run with `pytest -s tests/test_acceptance.py` to see the lines as they
complete, or `python3 -m boltzkit.cli selftest` for the same suite outside
pytest.  The kinetic-run criteria (7, 9) dominate the wall time; the whole
file stays under the documented budgets on a single core.
"""

import pytest

from boltzkit import acceptance


@pytest.mark.parametrize(
    "num,name,fn",
    acceptance.CRITERIA,
    ids=[f"criterion_{num:02d}_{name.replace(' ', '_')}" for num, name, _ in acceptance.CRITERIA],
)
def test_criterion(num, name, fn, capsys):
    ok, detail = fn()
    line = f"criterion {num:2d} ({name}): {'PASS' if ok else 'FAIL'} - {detail}"
    with capsys.disabled():
        print(line)
    assert ok, line
