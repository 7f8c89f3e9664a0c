import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

HQCSIM = os.environ.get("HQCSIM", "hqcsim")
CONFIGS = Path(__file__).resolve().parents[2] / "configs"

SMALL = {
    "scenario": {"name": "paper_example"},
    "grid": {"R_min": -6, "R_max": 6, "P_min": -6, "P_max": 6, "nR": 24, "nP": 24},
    "integrator": {"dt": 0.01, "t_end": 0.2},
    "ensemble": {"N": 2000, "seed": 5},
    "output": {"sample_times": [0.0, 0.1, 0.2]},
}


def hqcsim(*args):
    return subprocess.run([HQCSIM, *map(str, args)], capture_output=True, text=True, timeout=600)


def write(path, obj):
    path.write_text(json.dumps(obj))
    return path


def test_missing_grid_block_is_a_config_error(tmp_path):
    cfg = {k: v for k, v in SMALL.items() if k != "grid"}
    r = hqcsim("evolve-effective", "--config", write(tmp_path / "c.json", cfg), "--out", tmp_path / "o")
    assert r.returncode == 2
    assert "grid" in r.stderr
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["exit_status"] == 2
    assert manifest["error"]["key"] == "grid"


@pytest.mark.parametrize(
    "patch, key",
    [
        ({"grid": {"nR": "x"}}, "grid.nR"),
        ({"integrator": {"dt": -1}}, "integrator.dt"),
        ({"grid": {"nR": 16, "typo": 1}}, "grid.typo"),
        ({"closure": {"method": "magic"}}, "closure.method"),
    ],
)
def test_bad_values_name_the_key(tmp_path, patch, key):
    cfg = json.loads(json.dumps(SMALL))
    for block, v in patch.items():
        cfg[block] = v
    r = hqcsim("evolve-effective", "--config", write(tmp_path / "c.json", cfg), "--out", tmp_path / "o")
    assert r.returncode == 2
    assert key in r.stderr


def test_cli_parse_errors_exit_2(tmp_path):
    assert hqcsim("evolve-effective").returncode == 2
    assert hqcsim("no-such-subcommand").returncode == 2
    assert hqcsim("fig1", "--config", tmp_path / "missing.json").returncode == 2


def test_fig1_grid_and_header(tmp_path):
    r = hqcsim("fig1", "--config", CONFIGS / "fig1.json", "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    with open(tmp_path / "fig1.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["R", "theta", "dmu1", "dmu3"]
    assert len(rows) - 1 == 121 * 121


def test_maxent_check_isotropic_point(tmp_path):
    cfg = {"maxent": {"first_moments": [[0.5, 0, 0, 0]]}}
    r = hqcsim("maxent-check", "--config", write(tmp_path / "c.json", cfg), "--out", tmp_path / "o")
    assert r.returncode == 0, r.stderr
    assert "mu11 0.0833333, mu22 0.0833333, mu33 0.0833333" in r.stdout
    with open(tmp_path / "o" / "closure_report.csv") as f:
        row = next(csv.DictReader(f))
    for k in ("mu11", "mu22", "mu33"):
        assert float(row[k]) == pytest.approx(1 / 12, abs=1e-15)


def test_reproducible_rerun_from_manifest_is_bitwise_identical(tmp_path):
    cfg = write(tmp_path / "c.json", SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert hqcsim("ensemble", "--config", cfg, "--out", a, "--reproducible", "--threads", 4).returncode == 0
    r = hqcsim("ensemble", "--config", a / "manifest.json", "--out", b, "--reproducible", "--threads", 2)
    assert r.returncode == 0, r.stderr
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["config_hash"] == mb["config_hash"]
    assert ma["seed"] == mb["seed"] == 5
    assert ma["outputs"] == mb["outputs"]
    for name in ma["outputs"]:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_seed_override_is_recorded(tmp_path):
    cfg = write(tmp_path / "c.json", SMALL)
    r = hqcsim("ensemble", "--config", cfg, "--out", tmp_path / "o", "--seed", 99)
    assert r.returncode == 0, r.stderr
    m = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert m["seed"] == 99
    assert m["config"]["ensemble"]["seed"] == 99
    for k in ("hqc", "eigen", "nlohmann_json", "compiler", "cli11"):
        assert m["versions"][k]


def test_numerical_blowup_exits_3(tmp_path):
    cfg = dict(SMALL, integrator={"dt": 2.0, "t_end": 1000.0})
    r = hqcsim("evolve-effective", "--config", write(tmp_path / "c.json", cfg), "--out", tmp_path / "o")
    assert r.returncode == 3
    assert "node" in r.stderr
    m = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert m["error"]["kind"] == "numerical"


def test_trajectory_conserves_energy(tmp_path):
    r = hqcsim("trajectory", "--config", CONFIGS / "trajectory.json", "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    s = json.loads((tmp_path / "manifest.json").read_text())["summary"]
    assert s["max_relative_energy_drift"] < 1e-8
    assert s["max_norm_drift"] < 1e-12


def test_hierarchy_check_passes(tmp_path):
    cfg = dict(SMALL, ensemble={"N": 20000, "seed": 3, "bandwidth": 0.5})
    r = hqcsim("hierarchy-check", "--config", write(tmp_path / "c.json", cfg), "--out", tmp_path / "o")
    assert r.returncode == 0, r.stdout + r.stderr
    report = json.loads((tmp_path / "o" / "hierarchy_check.json").read_text())
    assert report["pass"]
