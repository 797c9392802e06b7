import copy
import json
import os

import pytest
from mpmath import mp, mpf

from flaremaass import cli
from flaremaass.cli import main, run_heatmap, run_regression, verify_case
from flaremaass.errors import ConfigurationError, NonConvergenceError
from flaremaass.records import (
    RunConfig,
    coeff_block,
    dumps,
    loads,
    parse_block,
    read_record,
    write_atomic,
)


def constant_record():
    """Synthetic Hecke record for the constant function (s = 1, a0 = 1)."""
    return {
        "format": "flaremaass-result",
        "version": "test",
        "config": RunConfig(group="hecke", parameter="0.35", digits=20).as_dict(),
        "analytic": False,
        "converged": True,
        "settings": {"y0": "0.28", "alpha0": "2.3"},
        "result": {"s": "1.0", "delta": "1.0", "lambda0": "0.0"},
        "coefficients": {"cusp": [coeff_block([1, 0, 0, 0], 5)],
                         "flare": [coeff_block([0, 0, 0], 5)]},
    }


# --- records ------------------------------------------------------------------

def test_run_config_validation():
    with pytest.raises(ConfigurationError):
        RunConfig(group="fuchsian", parameter="1")
    with pytest.raises(ConfigurationError):
        RunConfig(group="hecke", parameter="0.35", method="newton")
    with pytest.raises(ConfigurationError):
        RunConfig(group="hecke", parameter="0.35", eps="-1")
    with pytest.raises(ConfigurationError):
        RunConfig(group="hecke", parameter="0.35", digits=10)
    cfg = RunConfig(group="hecke", parameter="0.35", mc=12)
    assert RunConfig.from_dict(cfg.as_dict()) == cfg


def test_coefficient_blocks():
    block = coeff_block([mpf(1), mpf("-2.5e-9"), 0], 12)
    assert [e["n"] for e in block] == [0, 1, 2]
    assert parse_block(list(reversed(block))) == [1, mpf("-2.5e-9"), 0]
    with pytest.raises(ConfigurationError):
        parse_block([{"n": 1, "value": "1"}])


def test_record_round_trip_is_byte_identical(schottky100_record, tmp_path):
    text = dumps(schottky100_record)
    assert dumps(loads(text)) == text
    path = tmp_path / "r.json"
    write_atomic(str(path), text)
    assert path.read_text() == text
    assert dumps(read_record(str(path))) == text
    assert os.listdir(tmp_path) == ["r.json"]


def test_loads_rejects_other_documents():
    with pytest.raises(ConfigurationError):
        loads(json.dumps({"format": "other"}))


def test_record_contents(schottky100_record):
    rec = schottky100_record
    res = rec["result"]
    with mp.workdps(20):
        d, lam = mpf(res["delta"]), mpf(res["lambda0"])
        assert abs(lam - d * (1 - d)) < mpf(10) ** -18
        assert abs(d - mpf("0.5660980508")) < mpf(10) ** -8
    assert rec["converged"] and not rec["analytic"]
    assert rec["config"]["digits"] == 20
    assert rec["settings"]["M_F"] + 1 == len(rec["coefficients"]["flare"][0])
    assert rec["coefficients"]["flare"][0][0]["value"] == "1.0"
    assert all(c["passed"] for c in rec["checks"])
    assert rec["wall_time_s"] > 0


# --- commands -------------------------------------------------------------------

def test_solve_command_is_deterministic(tmp_path, capsys):
    args = ["solve", "--group", "schottky", "--theta-deg", "100", "--digits", "20",
            "--s0", "0.56", "--no-checks"]
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert main(args + ["--out", str(path)]) == 0
        rec = read_record(str(path))
        rec.pop("wall_time_s")
        outs.append(rec)
    assert outs[0] == outs[1]
    assert "delta = 0.56609805" in capsys.readouterr().err


def test_solve_rejects_bad_parameter(capsys):
    assert main(["solve", "--group", "hecke", "--r", "0.6", "--digits", "20"]) == 2
    err = capsys.readouterr().err
    assert "error" in err and "groups" in err


def test_solve_rejects_wrong_flags(capsys):
    assert main(["solve", "--group", "hecke", "--theta-deg", "100"]) == 2
    assert main(["solve", "--group", "schottky", "--theta-deg", "abc"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["solve", "--group", "torus", "--r", "0.3"])
    assert info.value.code == 2


def test_non_convergence_exit_code(monkeypatch, capsys):
    def boom(*a, **k):
        raise NonConvergenceError("cap", "search", trajectory=[])

    monkeypatch.setattr(cli, "secant_search", boom)
    code = main(["solve", "--group", "schottky", "--theta-deg", "100", "--digits", "20",
                 "--s0", "0.56"])
    assert code == 3
    assert "[search]" in capsys.readouterr().err


def test_info_command(capsys):
    assert main(["info", "--group", "hecke", "--r", "0.35", "--digits", "20"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["settings"]["M_C"] > 0 and info["group"]["anchor"] == "a_0"
    assert main(["info", "--group", "schottky", "--theta-deg", "120"]) == 0
    assert json.loads(capsys.readouterr().out)["analytic"] is True


def test_finite_volume_solve_is_analytic(capsys):
    assert main(["solve", "--group", "schottky", "--theta-deg", "120"]) == 0
    rec = loads(capsys.readouterr().out)
    assert rec["analytic"] and rec["result"]["delta"] == "1.0"
    assert rec["result"]["lambda0"] == "0.0"
    assert all(e["value"] == "0.0" for e in rec["coefficients"]["flare"][0][1:])


# --- heatmap ----------------------------------------------------------------------

def test_heatmap_outputs(schottky100_record, tmp_path):
    out = str(tmp_path / "hm")
    side = run_heatmap(schottky100_record, 12, out)
    rows = open(out + ".csv").read().splitlines()
    assert rows[0] == "x,y,value"
    assert len(rows) - 1 == side["in_domain_points"] > 0
    pgm = open(out + ".pgm").read().split()
    assert pgm[:4] == ["P2", "12", "12", "65535"]
    levels = [int(v) for v in pgm[4:]]
    assert len(levels) == 144 and min(levels) == 0 and max(levels) == 65535
    assert side["positivity"]["passed"]
    assert json.loads(open(out + ".json").read()) == side


def test_heatmap_constant_record_is_flat(tmp_path):
    out = str(tmp_path / "flat")
    side = run_heatmap(constant_record(), 8, out)
    assert side["min"] == side["max"] == "1.0"
    levels = open(out + ".pgm").read().split()[4:]
    assert set(levels) == {"0"}


def test_heatmap_refuses_unusable_records(tmp_path, capsys):
    rec = constant_record()
    rec["converged"] = False
    path = tmp_path / "bad.json"
    write_atomic(str(path), dumps(rec))
    assert main(["heatmap", str(path), "--out", str(tmp_path / "x")]) == 2
    analytic = cli.analytic_record(RunConfig(group="schottky", parameter="120"))
    with pytest.raises(ConfigurationError):
        run_heatmap(analytic, 4, str(tmp_path / "y"))
    with pytest.raises(ConfigurationError):
        run_heatmap(constant_record(), 0, str(tmp_path / "z"))


@pytest.mark.slow
def test_hecke_heatmap_positive(hecke035_record, tmp_path):
    side = run_heatmap(hecke035_record, 50, str(tmp_path / "hecke"))
    assert side["positivity"]["passed"]
    assert mpf(side["min"]) >= mpf("-1e-6")


# --- regression -------------------------------------------------------------------

def test_verify_finite_volume_case_without_solver(monkeypatch):
    def forbidden(*a, **k):
        raise AssertionError("solver must not run")

    monkeypatch.setattr(cli, "run_solve", forbidden)
    case = verify_case("schottky", 120, 50)
    assert case["passed"] and case["analytic"]
    got = {c["name"]: c["got"] for c in case["checks"]}
    assert got == {"delta": "1.0", "lambda0": "0.0", "b_n (n>=1)": "0.0"}


def test_verify_command_report(monkeypatch, tmp_path):
    monkeypatch.setattr(cli, "DEFAULT_CASES", {"hecke": [], "schottky": [120]})
    out = tmp_path / "report.json"
    assert main(["verify", "--table", "schottky", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"] and report["failed"] == []


def test_verify_failure_exit_code(monkeypatch, tmp_path, capsys):
    def failing(group, param, digits):
        return {"group": group, "parameter": str(param), "passed": False, "checks": []}

    monkeypatch.setattr(cli, "DEFAULT_CASES", {"hecke": ["0.35"], "schottky": [120]})
    monkeypatch.setattr(cli, "verify_case", failing)
    assert main(["verify", "--table", "all", "--out", str(tmp_path / "r.json")]) == 4
    assert "hecke:0.35" in capsys.readouterr().err


def test_regression_records_errors(monkeypatch):
    def broken(group, param, digits):
        raise NonConvergenceError("cap", "search")

    monkeypatch.setattr(cli, "DEFAULT_CASES", {"hecke": ["0.35"], "schottky": []})
    monkeypatch.setattr(cli, "verify_case", broken)
    report = run_regression("hecke", 20)
    assert not report["passed"] and "cap" in report["cases"][0]["error"]


def test_sweep_covers_the_full_table():
    cases = cli.table_cases("sweep")
    assert cases[0] == ("schottky", 94) and cases[-1] == ("schottky", 120)
    assert len(cases) == 27
    with pytest.raises(ConfigurationError):
        cli.table_cases("nope")
