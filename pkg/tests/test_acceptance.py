"""One test per exit criterion; each prints a PASS/FAIL line (visible with ``-s``)."""
from __future__ import annotations

import pytest

from latticetoff.acceptance import CRITERIA


@pytest.mark.parametrize("name, check", CRITERIA, ids=[name for name, _ in CRITERIA])
def test_criterion(name, check):
    ok, detail = check()
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail
