import json

import pytest

from tcperc.verify import SUITES, run_verification


def test_default_suite_passes():
    report = run_verification(max_n=12, instances=50, seed=1)
    assert report.passed
    d = report.to_dict()
    assert [s["name"] for s in d["suites"]] == list(SUITES)
    assert all(s["instances"] > 0 and s["checks"] > 0 for s in d["suites"])
    json.dumps(d)


def test_report_is_deterministic():
    a = run_verification(max_n=8, instances=10, seed=4).to_dict()
    b = run_verification(max_n=8, instances=10, seed=4).to_dict()
    for s in a["suites"] + b["suites"]:
        s.pop("seconds")
    assert a == b


def test_single_suite_selection():
    report = run_verification(max_n=6, instances=3, seed=0, suites=["catalan-counts"])
    assert [s.name for s in report.suites] == ["catalan-counts"]


def test_bad_arguments():
    with pytest.raises(ValueError):
        run_verification(max_n=3)
    with pytest.raises(ValueError):
        run_verification(max_n=17)
    with pytest.raises(ValueError):
        run_verification(suites=["nope"])
