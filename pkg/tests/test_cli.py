import json
import subprocess
import sys

import numpy as np
import pytest

from zccflows.cli import main

NEG = ["--a", "[[0,0,0],[1,0,0],[0,0,0]]", "--b", "[[0,0,0],[0,0,0],[0,1,0]]"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def strip_time(report):
    return {k: v for k, v in report.items() if k != "wall_time"}


def test_verify_theorem_default(capsys):
    code, rep = run(["verify-theorem", "--degree", "4", "--points", "10"], capsys)
    assert code == 0
    assert rep["schema"] == "zccflows/1"
    assert rep["config"]["degree"] == 4 and rep["seed"] == 0
    assert rep["max_residual"] <= 1e-9


def test_verify_theorem_splittings(capsys):
    assert run(["verify-theorem", "--degree", "3", "--splitting", "identity"], capsys)[0] == 0
    code, rep = run(["verify-theorem", "--degree", "3", "--splitting", "broken-symmetric"], capsys)
    assert code == 1
    assert rep["splitting_check"]["ok"] is False


def test_verify_theorem_right_nested(capsys):
    code, rep = run(["verify-theorem", "--degree", "3", "--letters", "2", "--right-nested"], capsys)
    assert code == 0
    assert {r["family"] for r in rep["words"]} == {"lyndon", "right-nested"}


def test_zcc_exit_codes(capsys):
    assert run(["zcc-check"], capsys)[0] == 0
    code, rep = run(["zcc-check", "--s", "0.5", "--t", "0.5"] + NEG, capsys)
    assert code == 1
    assert rep["max_defect"] >= 1e-3
    assert run(["zcc-check", "--probes", "0"], capsys)[0] == 2


@pytest.mark.parametrize("argv", [
    ["zcc-check", "--a", "not json"],
    ["zcc-check", "--a", "[[1,0],[0,1]]"],
    ["zcc-check", "--tol", "-1"],
    ["word-criterion", "--degree", "1"],
    ["verify-theorem", "--degree", "1"],
    ["sl3-demo", "--grid", ""],
    ["flow", "--function", "{\"kind\": \"nope\"}"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_word_criterion(capsys):
    code, rep = run(["word-criterion", "--degree", "3", "--probes", "2"], capsys)
    assert code == 0
    assert rep["max_defect"] <= 1e-5
    assert run(["word-criterion", "--degree", "2", "--probes", "1"] + NEG, capsys)[0] == 1


def test_flow_writes_csv(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    rep_path = tmp_path / "flow.json"
    code = main(["flow", "--time", "1.0", "--state", json.dumps([[[0, 0, 0], [0, 0, 0], [1, 0, 0]]] * 2),
                 "--out", str(out), "--report", str(rep_path)])
    assert code == 0
    header = out.read_text().splitlines()[0].split(",")
    assert header[:4] == ["step", "time", "x1_11", "x1_12"]
    rep = json.loads(rep_path.read_text())
    assert rep["kind"] == "flow"


def test_sl3_demo_csvs(tmp_path, capsys):
    code = main(["sl3-demo", "--out", str(tmp_path), "--report", str(tmp_path / "r.json")])
    assert code == 0
    names = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert names == sorted(f"{n}.csv" for n in ("a_s", "sigma_s", "b_s", "b_st", "tau_st", "a_st"))
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["max_error"] <= 1e-6
    rows = (tmp_path / "b_st.csv").read_text().splitlines()
    assert len(rows) == 1 + 16
    assert max(float(r.split(",")[-1]) for r in rows[1:]) <= 1e-6


def test_sl3_demo_origin_only(tmp_path, capsys):
    code = main(["sl3-demo", "--grid", "0", "--out", str(tmp_path)])
    capsys.readouterr()
    assert code == 0
    for p in tmp_path.glob("*.csv"):
        assert all(float(r.split(",")[-1]) == 0.0 for r in p.read_text().splitlines()[1:])


def test_sl3_demo_unwritable(tmp_path, capsys):
    assert run(["sl3-demo", "--grid", "0", "--out", str(tmp_path / "missing")], capsys)[0] == 2
    assert run(["zcc-check", "--out", str(tmp_path / "missing" / "r.json")], capsys)[0] == 2


def test_determinism(tmp_path, capsys):
    path = tmp_path / "report.json"
    texts = []
    for _ in range(2):
        assert main(["zcc-check", "--seed", "7", "--out", str(path)]) == 0
        texts.append(path.read_text())
    one, two = (json.loads(t) for t in texts)
    assert json.dumps(strip_time(one), sort_keys=True) == json.dumps(strip_time(two), sort_keys=True)
    assert main(["zcc-check", "--seed", "8", "--out", str(path)]) == 0
    assert strip_time(json.loads(path.read_text())) != strip_time(one)


def test_config_file_layering(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"s": 0.25, "t": 0.5, "probes": 2, "seed": 3}))
    code, rep = run(["zcc-check", "--config", str(cfg), "--t", "0.75"], capsys)
    assert code == 0
    assert rep["config"]["s"] == 0.25 and rep["config"]["t"] == 0.75
    assert rep["seed"] == 3 and len(rep["defects"]) == 2
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["zcc-check", "--config", str(cfg)], capsys)[0] == 2
    assert run(["zcc-check", "--config", str(tmp_path / "nope.json")], capsys)[0] == 2


def test_rk4_integrator_flag(capsys):
    code, rep = run(["zcc-check", "--integrator", "rk4_fixed", "--step", "0.01", "--probes", "1"], capsys)
    assert code == 0
    assert rep["inputs"]["integrator"]["method"] == "rk4_fixed"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zccflows", "zcc-check", "--probes", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
    assert np.isfinite(json.loads(proc.stdout)["max_defect"])
