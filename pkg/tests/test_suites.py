import json
from collections import Counter

import pytest

from drinfeld_reciprocity.errors import UnknownSuite
from drinfeld_reciprocity.suites import SUITES, list_suites, run_suite, run_suites, write_report


def test_registry_lists_every_suite():
    names = [entry["name"] for entry in list_suites()]
    assert names == list(SUITES)
    assert {"different", "delta", "main-theorem-r", "iwasawa", "conjugation"} <= set(names)


def test_different_suite(carlitz_q2_config, carlitz_q2):
    report = run_suite("different", carlitz_q2_config, carlitz_q2)
    assert report.passed, [c.to_json() for c in report.cases if not c.passed]
    valuations = [
        (c.inputs["n"], c.got) for c in report.cases if c.case == "different_valuation"
    ]
    assert valuations == [(1, "0"), (2, "1"), (3, "2")]
    summary = report.summary()
    assert summary["suite"] == "different"
    assert summary["config_digest"] == carlitz_q2_config.digest
    assert summary["failed"] == 0 and summary["pass"] is True


def test_runs_are_deterministic(carlitz_q2_config, carlitz_q2):
    first = run_suite("different", carlitz_q2_config, carlitz_q2)
    second = run_suite("different", carlitz_q2_config, carlitz_q2)
    assert [c.to_json() for c in first.cases] == [c.to_json() for c in second.cases]


@pytest.mark.parametrize("name", list(SUITES))
def test_every_suite_passes_on_carlitz(carlitz_q2_config, carlitz_q2, name):
    config = carlitz_q2_config.with_overrides(samples=2)
    report = run_suite(name, config, carlitz_q2)
    assert report.cases
    assert report.passed, [c.to_json() for c in report.asserted if not c.passed]


@pytest.mark.parametrize("name", ["tower", "different", "delta", "main-theorem-lhs"])
def test_suites_pass_on_twisted_module(twisted_q2_config, twisted_q2, name):
    config = twisted_q2_config.with_overrides(samples=2)
    report = run_suite(name, config, twisted_q2)
    assert report.cases
    assert report.passed, [c.to_json() for c in report.asserted if not c.passed]


def test_delta_suite(carlitz_q2_config, carlitz_q2):
    report = run_suite("delta", carlitz_q2_config, carlitz_q2)
    assert report.passed, [c.to_json() for c in report.asserted if not c.passed]
    cases = Counter(c.case for c in report.asserted)
    assert cases["upward"] == cases["composed_lift_value"] > 0
    assert cases["trace_identity"] > 0
    # the canonical lift of an embedded element is reported, never asserted
    assert all(c.informational for c in report.cases if c.case == "upward_canonical_lift")


def test_unknown_suite(carlitz_q2_config, carlitz_q2):
    with pytest.raises(UnknownSuite):
        run_suite("no-such-suite", carlitz_q2_config, carlitz_q2)
    with pytest.raises(UnknownSuite) as info:
        run_suites(carlitz_q2_config, ["different", "bogus"], carlitz_q2)
    assert "different" in info.value.details["available"]


def test_config_suites_select(carlitz_q2_config, carlitz_q2):
    config = carlitz_q2_config.with_overrides(suites=["different"])
    reports = run_suites(config, module=carlitz_q2)
    assert [r.suite for r in reports] == ["different"]


def test_write_report(tmp_path, carlitz_q2_config, carlitz_q2):
    report = run_suite("different", carlitz_q2_config, carlitz_q2)
    path = tmp_path / "report.jsonl"
    write_report([report], str(path))
    rows = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == len(report.cases) + 1
    assert rows[-1]["suite"] == "different" and rows[-1]["pass"] is True
    first = rows[0]
    assert set(first) >= {"suite", "case", "inputs", "expected", "got", "pass", "prec"}
    assert first["case"] == "different_valuation"
    # exact comparisons carry no precision
    assert first["prec"] is None
