"""One test per acceptance criterion, at the reference tolerances.

Each test records a line such as ``criterion 5: FAIL ...`` that is printed in
the terminal summary.  Running this file directly prints the same lines.
"""

import json

import pytest

from hypercount.acceptance import CRITERIA, default_config_text, run_criterion

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = {}

CONFIG = json.loads(default_config_text())["criteria"]


def line(res):
    return f"criterion {res.id:>2} [{'PASS' if res.passed else 'FAIL'}] {res.title}: {res.detail} ({res.seconds:.1f}s)"


@pytest.mark.parametrize("cid", list(CRITERIA), ids=lambda c: f"criterion_{c}")
def test_criterion(cid):
    res = run_criterion(cid, CONFIG[cid])
    ACCEPTANCE_LINES[cid] = line(res)
    print(line(res))
    assert res.passed, res.detail


def test_default_config_lists_every_criterion():
    assert set(CONFIG) == set(CRITERIA)


if __name__ == "__main__":
    for cid in CRITERIA:
        print(line(run_criterion(cid, CONFIG[cid])), flush=True)
