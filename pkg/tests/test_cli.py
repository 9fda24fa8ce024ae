import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from lielcs import catalog
from lielcs.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _write_scenario(tmp_path, **over):
    doc = {"schema_version": 1, "name": "tmp", "group": "R^2",
           "drift": {"kind": "derivation", "matrix": [[-1, 0], [0, -2]]},
           "controls": [[1, 0], [0, 1]], "omega": [1, 1], "analysis": ["analyze"], "seed": 5}
    doc.update(over)
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps(doc, indent=2))
    return p


def test_analyze_se2(capsys):
    code, out, _ = run(capsys, "analyze", "--scenario", "se2_bounded.json")
    assert code == 0
    rep = json.loads(out)
    assert rep["internal"]["internal_verdict"] == "stable"
    assert rep["splitting"]["dims"]["minus"] == 2
    assert rep["bibo"]["se2_to_so2"]["bibo_verdict"] == "bibo_stable"
    assert rep["bibo"]["se2_to_so2"]["conjugation"]["intertwines"]
    assert rep["g0_compact"]["provenance"] in ("computed", "declared")
    assert rep["contraction"]["c"] <= 1.0


def test_analyze_sl2_unstable(capsys):
    code, out, _ = run(capsys, "analyze", "--scenario", "sl2_adH")
    assert code == 0 and json.loads(out)["internal"]["internal_verdict"] == "unstable"


def test_analyze_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", "--scenario", str(tmp_path / "missing.json"))
    assert code == 2 and "missing.json" in err


def test_analyze_report_round_trips(capsys, tmp_path):
    out = tmp_path / "rep.json"
    assert main(["analyze", "--scenario", "heisenberg_stable", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    # the embedded system description reloads as a scenario
    doc = {"schema_version": 1, "name": "again", **rep["system"]}
    p = tmp_path / "again.json"
    p.write_text(json.dumps(doc))
    again = catalog.load_scenario(p)
    assert np.allclose(again.spec.derivation, catalog.packaged_scenario("heisenberg_stable").spec.derivation)


def test_validation_errors_are_line_anchored(capsys, tmp_path):
    p = _write_scenario(tmp_path, schema_version=2)
    code, _, err = run(capsys, "analyze", "--scenario", str(p))
    assert code == 2 and f"{p}:" in err and "schema_version" in err
    p.write_text('{"schema_version": 1,\n "group": }')
    code, _, err = run(capsys, "analyze", "--scenario", str(p))
    assert code == 2 and f"{p}:2" in err


def test_seed_required_for_sampling(capsys, tmp_path):
    doc = json.loads(_write_scenario(tmp_path).read_text())
    del doc["seed"]
    doc["analysis"] = ["verify"]
    p = tmp_path / "noseed.json"
    p.write_text(json.dumps(doc))
    code, _, err = run(capsys, "analyze", "--scenario", str(p))
    assert code == 2 and "seed" in err


def test_numerical_failure_exit_code(capsys, tmp_path):
    p = _write_scenario(tmp_path, drift={"kind": "derivation", "matrix": [[-1, 0], [0, -1.0000003]]})
    code, _, err = run(capsys, "analyze", "--scenario", str(p))
    assert code == 3 and "numerical" in err


def test_simulate_zero_control_is_constant(capsys):
    code, out, _ = run(capsys, "simulate", "--scenario", "se2_bounded", "--control", "zero", "--x0", "identity")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:2] == ["time", "gauge"]
    vals = np.array(rows[1:], dtype=float)
    assert len(vals) == 101 and np.allclose(vals[:, 1:], 0)


def test_simulate_random_is_deterministic(capsys):
    args = ("simulate", "--scenario", "heisenberg_stable", "--control", "random:8", "--seed", "7")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    _, c, _ = run(capsys, *args[:-1], "8")
    assert a == b and a != c


def test_simulate_control_file(capsys, tmp_path):
    ctl = tmp_path / "u.json"
    ctl.write_text(json.dumps({"breakpoints": [0, 1], "values": [[1, 0], [0, -1]], "end": 2.0}))
    code, out, _ = run(capsys, "simulate", "--scenario", "se2_bounded", "--control", str(ctl),
                       "--horizon", "2", "--dt-out", "0.5")
    assert code == 0 and len(out.strip().splitlines()) == 6


def test_simulate_bad_arguments(capsys):
    assert run(capsys, "simulate", "--scenario", "se2_bounded", "--horizon", "-1")[0] == 2
    assert run(capsys, "simulate", "--scenario", "se2_bounded", "--control", "random:x")[0] == 2
    assert run(capsys, "simulate", "--scenario", "se2_bounded", "--x0", "[1, 2]")[0] == 2


def test_simulate_x0_coordinates(capsys):
    code, out, _ = run(capsys, "simulate", "--scenario", "r1_stable", "--x0", "[2.0]", "--horizon", "1",
                       "--dt-out", "1")
    last = out.strip().splitlines()[-1].split(",")
    assert code == 0 and float(last[2]) == pytest.approx(2 * np.exp(-1), abs=1e-12)


def test_verify_sl2(capsys, tmp_path):
    out = tmp_path / "v.json"
    code, text, _ = run(capsys, "verify", "--scenario", "sl2_adH.json", "--seed", "42", "--out", str(out))
    assert code == 0 and "ALL PASS" in text
    rows = {r["suite"]: r for r in json.loads(out.read_text())["results"]["sl2_adH"]}
    assert rows["theorem_main_bound"]["status"] == "not applicable"
    assert all(r["status"] == "pass" for k, r in rows.items() if k != "theorem_main_bound")


def test_verify_without_arguments(capsys):
    assert run(capsys, "verify")[0] == 2


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    assert "heisenberg3: dim 3, nilpotent" in out
    assert "se2: dim 3, solvable, G0 compact (declared)" in out
    for name in catalog.packaged_scenario_names():
        assert name in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "lielcs", "catalog"], capture_output=True, text=True)
    assert r.returncode == 0 and "so3" in r.stdout
