import importlib
import json

import pytest

from drinfeld_reciprocity import core
from drinfeld_reciprocity.cli import main
from drinfeld_reciprocity.config import parse_config_text
from drinfeld_reciprocity.server import ContextRegistry, _register_tools
from drinfeld_reciprocity.tools.compute import parse_element, tool_compute_pairing, tool_show_tower, tool_validate_module
from drinfeld_reciprocity.tools.verify import tool_run_suite

CARLITZ_Q2 = """
field.p = 2
module.rho_pi[0][1] = 1
module.rho_pi[1][0] = 1
run.levels = 2
run.samples = 2
"""


def test_registered_tools():
    assert set(_register_tools()) == {
        "validate_module",
        "show_tower",
        "compute_delta",
        "compute_pairing",
        "kummer_lhs",
        "list_suites",
        "run_suite",
    }


def test_validate_module_envelope():
    resp = tool_validate_module({"config_text": CARLITZ_Q2})
    assert resp["ok"], resp
    result = resp["result"]
    assert result["config_digest"] == parse_config_text(CARLITZ_Q2).digest
    assert result["theorem_bounds"]["2"] == "9/4"
    assert result["log_bound"] == "2"


def test_show_tower_envelope():
    resp = tool_show_tower({"config_text": CARLITZ_Q2, "n": 2})
    assert resp["ok"], resp
    assert resp["result"]["different_generator_valuation"] == "1"
    assert resp["result"]["vanishing_bound"] == "3"


@pytest.mark.parametrize("n", [0, "two"])
def test_show_tower_bad_level(n):
    resp = tool_show_tower({"config_text": CARLITZ_Q2, "n": n})
    assert not resp["ok"]
    assert resp["error"]["code"] == "invalid_params"


def test_missing_config():
    resp = tool_validate_module({})
    assert resp["error"]["code"] == "schema_error"


def test_pairing_envelope():
    resp = tool_compute_pairing(
        {"config_text": CARLITZ_Q2, "n": 2, "alpha": "0,0,1", "beta": "0;1", "realize": True}
    )
    assert resp["ok"], resp
    assert resp["result"]["value"] == {"n": 2, "coord": [1, 1]}
    assert resp["result"]["alpha_valuation"] == "2"


def test_pairing_valuation_error():
    resp = tool_compute_pairing({"config_text": CARLITZ_Q2, "n": 2, "alpha": "0;1", "beta": "0;1"})
    assert not resp["ok"]
    assert resp["error"]["code"] == "valuation_too_small"
    assert resp["error"]["details"]["bound"] == "2"


def test_parse_element(carlitz_q2, pi):
    level = carlitz_q2.level(2)
    x = parse_element("1@2", level)
    assert x.equals(level.constant(pi**2))[0]
    with pytest.raises(ValueError):
        parse_element("2", level)
    with pytest.raises(ValueError):
        parse_element("0;0;1", level)


def test_run_suite_tool():
    resp = tool_run_suite({"config_text": CARLITZ_Q2, "suite": "different", "include_records": True})
    assert resp["ok"], resp
    assert resp["result"]["pass"] is True
    assert resp["result"]["records"][-1]["suite"] == "different"
    bad = tool_run_suite({"config_text": CARLITZ_Q2, "suite": "bogus"})
    assert bad["error"]["code"] == "unknown_suite"


def test_core_unwraps():
    assert core.show_tower(CARLITZ_Q2, 1, inline=True)["degree"] == 1
    with pytest.raises(ValueError):
        core.show_tower(CARLITZ_Q2, 0, inline=True)
    assert any(s["name"] == "delta" for s in core.list_suites())


def test_context_registry_builds_once():
    registry = ContextRegistry()
    config = parse_config_text(CARLITZ_Q2)
    first = registry.get_or_build(config)
    second = registry.get_or_build(config.with_overrides(seed=5, samples=1))
    assert first is second
    assert len(registry) == 1
    registry.clear()
    assert len(registry) == 0


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "carlitz.conf"
    path.write_text(CARLITZ_Q2, encoding="utf-8")
    return path


def test_cli_verify(config_file, tmp_path, capsys):
    report = tmp_path / "out.jsonl"
    code = main(["verify", "--config", str(config_file), "--suite", "different", "--report", str(report)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["suite"] == "different" and summary["pass"] is True
    assert report.exists()


def test_cli_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.conf"
    bad.write_text("field.p = 6\n", encoding="utf-8")
    assert main(["verify", "--config", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "schema_error" in err
    assert "field.p = 6 is not prime" in err


def test_cli_unknown_suite(config_file):
    assert main(["verify", "--config", str(config_file), "--suite", "bogus"]) == 2


def test_cli_compute_delta(config_file, capsys):
    assert main(["compute", "delta", "--config", str(config_file), "--n", "2", "--beta", "0;1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["valuation"] == "-1/2"
    assert out["modulus_valuation"] == "1"


def test_cli_suites(capsys):
    assert main(["suites"]) == 0
    assert "main-theorem-lhs" in capsys.readouterr().out


@pytest.mark.parametrize(
    "name",
    ["config", "core", "drinfeld", "lattice", "laurent", "reciprocity", "residue", "suites", "tower", "twisted"],
)
def test_module_docstrings(name):
    module = importlib.import_module(f"drinfeld_reciprocity.{name}")
    assert module.__doc__ and module.__doc__.strip()
