import json
from fractions import Fraction
import subprocess
import sys

import pytest

from tmotive import tower
from tmotive.cli import RunConfig, main, parse_value, render, run

T2 = tower(2)


def report(tmp_path, *args):
    out = tmp_path / "r.json"
    code = main([*args, "--out", str(out)])
    return code, json.loads(out.read_text())


@pytest.mark.parametrize("cmd", ["periods", "siegel", "dual-check", "iso-check", "dseries",
                                 "eliminate"])
def test_each_command_passes(tmp_path, cmd, capsys):
    code, rep = report(tmp_path, cmd, "--precision", "20")
    assert code == 0
    assert rep["passed"] and rep["assertions"]
    assert rep["schema"] == "tmotive-report/1"
    assert rep["config"]["experiment"] == cmd and rep["config"]["precision"] == 20
    assert "PASS" in capsys.readouterr().out


def test_periods_report_values(tmp_path):
    _, rep = report(tmp_path, "periods", "--q", "2", "--precision", "24")
    assert rep["results"]["periods"]["v_pi1"] == "-2"
    assert rep["results"]["periods"]["v_pi2"] == "-4/3"
    _, rep = report(tmp_path, "periods", "--q", "3", "--precision", "24")
    assert rep["results"]["periods"]["v_pi2"] == "-9/8"
    assert int(rep["results"]["periods"]["residual1"]) >= 24


def test_failure_sets_exit_code(tmp_path):
    # a large parameter puts D(a) outside the domain of the Carlitz logarithm
    code, rep = report(tmp_path, "siegel", "--motive", "Mt", "--a", "t^(-6)")
    assert code == 1 and not rep["passed"]
    assert any("OutsideLogDomain" in a.get("detail", "") for a in rep["assertions"])


def test_same_config_same_bytes():
    cfg = RunConfig("all", seed=7, precision=20, instances=5)
    assert render(run(cfg)) == render(run(cfg))


def test_all_twice_in_fresh_processes(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "tmotive.cli", "all", "--seed", "7", "--out", str(out)],
                       check=True, capture_output=True)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_json_flag(capsys):
    main(["iso-check", "--a", "1", "--a2", "w", "--json"])
    rep = json.loads(capsys.readouterr().out)
    assert rep["results"]["iso_check"][0]["iso"] is True


def test_parse_value_short_forms():
    T = T2
    x = parse_value("t + t^2", T)
    assert [e for e, _ in x.terms()] == [1, 2]
    y = parse_value("w*t^(1/3)", T)
    assert y.valuation() == Fraction(1, 3)
    assert parse_value(x.to_literal(), T) == x
    with pytest.raises(ValueError):
        parse_value("banana", T)
