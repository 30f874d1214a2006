"""One PASS/FAIL line per acceptance criterion (run with ``pytest -s`` to see them)."""
import pytest

from cflab.acceptance import CRITERIA


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid, capsys):
    check = CRITERIA[cid]()
    with capsys.disabled():
        print()
        print(check.line(), {k: v for k, v in check.details.items()})
    assert check.passed, check.details
