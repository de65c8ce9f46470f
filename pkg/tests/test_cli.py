import json
import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from ozlab.cli import main

SMALL_CFG = {
    "seed": 42,
    "model": {"p": 0.35, "q": 1.0},
    "observables": {
        "two_point": {"direction_angle": 0.0, "n_max": 10, "samples": 100000},
        "halfspace": {"direction_angle": 0.0, "L": 4, "m_max": 5, "samples": 100000},
    },
    "explore": {"direction_angle": 0.0, "L": 2, "n_slices": 6,
                "budget": 300000, "max_traces": 400},
    "kmrp": {"law": "from-exploration", "kappa": 0.6, "min_pieces": 30,
             "n_check": 100, "clt": {"n": 600, "trials": 5000}},
}


def _write_cfg(tmp_path, cfg):
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path


def test_run_smoke_and_outputs(tmp_path):
    cfg = dict(SMALL_CFG)
    cfg["out"] = str(tmp_path / "out")
    rc = main(["run", str(_write_cfg(tmp_path, cfg)), "--threads", "1"])
    assert rc == 0
    out = tmp_path / "out"
    for name in ("two_point.csv", "halfspace.csv", "lengths.csv", "traces.jsonl",
                 "rates.csv", "clt_hist.csv", "manifest.json"):
        assert (out / name).exists(), name
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert set(manifest["outputs"]) >= {"two_point.csv", "rates.csv"}
    # every CSV row carries the run id
    run_id = manifest["run_id"]
    for csv in out.glob("*.csv"):
        lines = csv.read_text().strip().splitlines()
        assert lines[0].startswith("run_id")
        assert all(ln.startswith(run_id) for ln in lines[1:])


def test_run_determinism_byte_identical(tmp_path):
    cfg = dict(SMALL_CFG)
    outs = []
    for tag in ("a", "b"):
        cfg["out"] = str(tmp_path / tag)
        rc = main(["run", str(_write_cfg(tmp_path, cfg)), "--threads", "1"])
        assert rc == 0
        outs.append(tmp_path / tag)
    for csv in sorted(outs[0].glob("*.csv")):
        other = outs[1] / csv.name
        assert csv.read_bytes() == other.read_bytes(), csv.name
    assert (outs[0] / "traces.jsonl").read_bytes() == (outs[1] / "traces.jsonl").read_bytes()


def test_seed_changes_outputs(tmp_path):
    cfg = dict(SMALL_CFG)
    cfg["out"] = str(tmp_path / "s1")
    main(["run", str(_write_cfg(tmp_path, cfg)), "--threads", "1"])
    cfg["out"] = str(tmp_path / "s2")
    main(["run", str(_write_cfg(tmp_path, cfg)), "--threads", "1", "--seed", "43"])
    a = (tmp_path / "s1" / "two_point.csv").read_text().splitlines()[1:]
    b = (tmp_path / "s2" / "two_point.csv").read_text().splitlines()[1:]
    assert a != b


def test_kmrp_solve_geometric(tmp_path):
    law = {"kappa": 0.5, "initial": [[1, 0.0, 1.0]], "interior": [[1, 0.0, 0.5]],
           "tail_rate": None}
    lp = tmp_path / "law.json"
    lp.write_text(json.dumps(law))
    rc = main(["kmrp", "solve", str(lp), "--out", str(tmp_path)])
    assert rc == 0
    rows = (tmp_path / "rates.csv").read_text().splitlines()
    header = rows[0].split(",")
    vals = dict(zip(header, rows[1].split(",")))
    assert abs(float(vals["R_p"]) - 2.0) < 1e-12
    assert abs(float(vals["amplitude"]) - 1.0) < 1e-12


def test_kmrp_check(tmp_path):
    law = {"kappa": 0.5, "initial": [[1, 0.0, 1.0]],
           "interior": [[1, 0.0, 0.25], [2, 0.0, 0.25]], "tail_rate": None}
    lp = tmp_path / "law.json"
    lp.write_text(json.dumps(law))
    assert main(["kmrp", "check", str(lp), "--n", "300"]) == 0


def test_usage_errors():
    assert main([]) == 2
    assert main(["definitely-not-a-command"]) == 2
    assert main(["run"]) == 2


def test_missing_config_is_usage_error(tmp_path):
    assert main(["run", str(tmp_path / "nope.yaml")]) == 2


def test_invalid_config_rejected(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump({"model": {"p": 1.5, "q": 1.0}}))
    assert main(["run", str(bad)]) == 1


def test_failed_stage_partial_manifest(tmp_path):
    cfg = {
        "seed": 1,
        "model": {"p": 0.2, "q": 1.0},
        "out": str(tmp_path / "out"),
        # conditioning that can essentially never be met within the budget
        "explore": {"direction_angle": 0.0, "L": 4, "n_slices": 30,
                    "budget": 2000, "max_traces": 50},
    }
    rc = main(["run", str(_write_cfg(tmp_path, cfg))])
    assert rc == 1
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["status"].startswith("failed")


def test_report_staging(tmp_path):
    cfg = dict(SMALL_CFG)
    cfg["out"] = str(tmp_path / "run")
    main(["run", str(_write_cfg(tmp_path, cfg)), "--threads", "1"])
    rc = main(["report", "--run", str(tmp_path / "run"), "--out", str(tmp_path / "staged")])
    assert rc == 0
    staged = tmp_path / "staged"
    for name in ("two_point.csv", "halfspace.csv", "gaps.csv", "clt_hist.csv"):
        assert (staged / name).exists(), name
    gaps = (staged / "gaps.csv").read_text().splitlines()
    assert gaps[0] == "run_id,gap,count"
    assert len(gaps) > 1


def test_console_script_entrypoint():
    out = subprocess.run([sys.executable, "-m", "ozlab.cli", "--help"],
                         capture_output=True, text=True)
    assert out.returncode in (0, 2)
    assert "ozlab" in out.stdout or "ozlab" in out.stderr
