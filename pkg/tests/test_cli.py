import csv
import json
import math

import numpy as np
import pytest

from annloewner import cli, io, presets


def run(argv, capsys=None):
    code = cli.main(argv)
    return code


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_format_float_17_digits():
    assert io.format_float(0.1) == "0.10000000000000001"
    assert io.format_float(float("inf")) == "inf"
    assert io.format_float(float("nan")) == "nan"


def test_dumps_sorted_and_stable():
    obj = {"b": [1.0 / 3.0, np.float64(2.0)], "a": {"z": True, "y": None}, "c": 1 + 2j}
    text = io.dumps(obj)
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.33333333333333331" in text
    parsed = json.loads(text)
    assert parsed["c"] == {"re": 1, "im": 2}


def test_kernel_command(tmp_path):
    assert cli.main(["kernel", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "kernel.csv")))
    assert rows[0] == ["r", "re_z", "im_z", "re_K", "im_K", "re_p", "im_p"]
    r0 = [row for row in rows[1:] if float(row[0]) == 0.0][0]
    z = complex(float(r0[1]), float(r0[2]))
    assert complex(float(r0[3]), float(r0[4])) == pytest.approx((1 + z) / (1 - z), abs=1e-14)
    rep = json.loads((tmp_path / "kernel_report.json").read_text())
    assert rep["passed"] and rep["reconstruction_error"] < 1e-8


def test_kernel_with_measures(tmp_path):
    cfg = write(tmp_path, {"r": [0.2], "grid": 4,
                           "measures": {"mu1": {"uniform": 1.0}, "mu2": {}}})
    assert cli.main(["kernel", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "kernel.csv")))[1:]
    assert all(float(r[5]) == 1.0 and float(r[6]) == 0.0 for r in rows)


def test_evolve_command_and_trajectory_csv(tmp_path):
    cfg = write(tmp_path, {"preset": "rotation", "s": 0.0, "t": 1.0, "points": [[0.3, 0.0], [0.0, 0.5]]})
    assert cli.main(["evolve", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "trajectories.csv")))
    assert set(rows[0]) == {"point", "t", "re_w", "im_w", "rho", "r_of_t"}
    last = [r for r in rows if r["point"] == "0"][-1]
    assert float(last["t"]) == 1.0
    w = complex(float(last["re_w"]), float(last["im_w"]))
    assert abs(w - 0.3 * np.exp(0.7j)) < 1e-8
    summary = json.loads((tmp_path / "evolve_summary.json").read_text())
    assert [t["status"] for t in summary["trajectories"]] == ["completed", "completed"]


def test_evolve_solver_failure_exit_code(tmp_path):
    cfg = write(tmp_path, {"preset": "mixed_split", "t": 2.0, "points": [[0.5, 0.0]]})
    assert cli.main(["evolve", "--config", cfg]) == 3


def test_classify_and_validate(tmp_path, capsys):
    assert cli.main(["classify", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "type IV" in out and "consistent" in out
    rep = json.loads((tmp_path / "type_report.json").read_text())
    assert rep["type"]["declared_type"] == "IV"
    bad = write(tmp_path, {"preset": "mixed_split"})
    assert cli.main(["validate", "--config", bad]) == 2
    assert cli.main(["classify", "--config", bad]) == 2
    good = write(tmp_path, {"preset": "mixed_rotation"}, "good.json")
    assert cli.main(["validate", "--config", good]) == 0


def test_classify_with_inline_driving(tmp_path, capsys):
    cfg = write(tmp_path, {"driving": presets.exp_approach().to_dict()})
    assert cli.main(["classify", "--config", cfg]) == 0
    assert "type I " in capsys.readouterr().out


def test_chain_command(tmp_path):
    cfg = write(tmp_path, {"preset": "random_atomic:2", "samples": 8, "grid": 3})
    assert cli.main(["chain", "--config", cfg, "--out", str(tmp_path), "--seed", "4"]) == 0
    rep = json.loads((tmp_path / "chain_report.json").read_text())
    assert all(rep["checks"].values())
    header = next(csv.reader(open(tmp_path / "chain.csv")))
    assert header == ["t", "re_z", "im_z", "re_f", "im_f", "abs_f"]


def test_selftest_subset(tmp_path, capsys):
    cfg = write(tmp_path, {"criteria": [1, 2, 11]})
    assert cli.main(["selftest", "--config", cfg, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3 and "3/3 criteria passed" in out


def test_selftest_failure_exit_code(tmp_path, monkeypatch):
    from annloewner import acceptance
    crit = list(acceptance.CRITERIA)
    crit[0] = (1, "forced failure", lambda: (False, "forced"))
    monkeypatch.setattr(acceptance, "CRITERIA", tuple(crit))
    cfg = write(tmp_path, {"criteria": [1]})
    assert cli.main(["selftest", "--config", cfg]) == 2


@pytest.mark.parametrize("cfg", [{"preset": "split", "bogus": 1}, {}, {"preset": "split", "driving": {}},
                                 {"preset": "split", "solver": {"rel_tol": -1}},
                                 {"preset": "no_such_preset"},
                                 {"driving": {"system": {"kind": "constant"}, "measures": []}}])
def test_bad_configs_exit_1(tmp_path, cfg):
    assert cli.main(["classify", "--config", write(tmp_path, cfg)]) == 1


def test_usage_errors_exit_1(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(["no-such-command"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["kernel", "--seed", "abc"])
    assert info.value.code == 1
    assert cli.main(["kernel", "--config", str(tmp_path / "missing.json")]) == 1
    assert cli.main(["evolve", "--tol", "-1"]) == 1


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ANNLOEWNER_THREADS", "0")
    assert cli.main(["kernel"]) == 1
    monkeypatch.setenv("ANNLOEWNER_THREADS", "many")
    assert cli.main(["kernel"]) == 1


def test_reports_byte_identical_across_runs_and_threads(tmp_path, monkeypatch):
    cfg = write(tmp_path, {"preset": "random_atomic:3", "samples": 6, "grid": 3})
    a, b = tmp_path / "a", tmp_path / "b"
    monkeypatch.setenv("ANNLOEWNER_THREADS", "1")
    assert cli.main(["chain", "--config", cfg, "--out", str(a), "--seed", "9"]) == 0
    monkeypatch.setenv("ANNLOEWNER_THREADS", "4")
    assert cli.main(["chain", "--config", cfg, "--out", str(b), "--seed", "9"]) == 0
    for name in ("chain_report.json", "chain.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ev = write(tmp_path, {"preset": "split", "grid": 3}, "ev.json")
    assert cli.main(["evolve", "--config", ev, "--out", str(a)]) == 0
    monkeypatch.setenv("ANNLOEWNER_THREADS", "1")
    assert cli.main(["evolve", "--config", ev, "--out", str(b)]) == 0
    assert (a / "trajectories.csv").read_bytes() == (b / "trajectories.csv").read_bytes()


def test_tol_flag_changes_solver(tmp_path):
    cfg = write(tmp_path, {"preset": "random_atomic:1", "t": 2.0, "grid": 2})
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["evolve", "--config", cfg, "--out", str(a), "--tol", "1e-4"]) == 0
    assert cli.main(["evolve", "--config", cfg, "--out", str(b), "--tol", "1e-10"]) == 0
    sa = json.loads((a / "evolve_summary.json").read_text())["trajectories"][0]
    sb = json.loads((b / "evolve_summary.json").read_text())["trajectories"][0]
    assert sa["n_steps"] < sb["n_steps"]
    assert math.dist(sa["w_end"], sb["w_end"]) < 1e-3
