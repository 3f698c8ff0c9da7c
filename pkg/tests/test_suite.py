import json

import pytest

from tidyscale import suite
from tidyscale.errors import UnsupportedError, ValidationError


def test_registry_and_traceability():
    assert list(suite.CHECKS) == [f"C{i}" for i in range(1, 13)]
    claims = [c.claim for c in suite.CHECKS.values()]
    assert len(set(claims)) == len(claims)
    report = suite.run_suite(seed=0, cases=2, ids=["C1"]).to_json()
    assert set(report["traceability"]) == set(suite.CHECKS)


@pytest.mark.parametrize("cid", list(suite.CHECKS))
def test_each_check_passes_small(cid):
    res = suite.run_check(cid, seed=3, cases=6)
    assert res.passed, res.to_json()


def test_run_check_errors():
    with pytest.raises(ValidationError):
        suite.run_check("C99")
    with pytest.raises(UnsupportedError):
        suite.run_check("C2", config="shift:S3/A3")


def test_same_seed_same_report():
    a = suite.run_suite(seed=7, cases=3, ids=["C1", "C5", "C12"]).dumps()
    b = suite.run_suite(seed=7, cases=3, ids=["C1", "C5", "C12"]).dumps()
    assert a == b
    one = suite.run_check("C3", "matrix:p=3", seed=1, cases=4)
    two = suite.run_check("C3", "matrix:p=3", seed=1, cases=4)
    assert [c.to_json() for c in one.cases] == [c.to_json() for c in two.cases]


def test_exploratory_never_fails():
    ex = suite.explore_u0(seed=0, cases=6)
    assert ex["cases"] == 6 and ex["agree"] + ex["disagree"] == 6
    report = json.loads(suite.run_suite(seed=0, cases=2, ids=["C9"]).dumps())
    assert "exploratory" in report and report["passed"]
