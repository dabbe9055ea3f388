import csv
import json

import numpy as np
import pytest
import yaml

from dirac_threshold import cli, runs
from dirac_threshold.localization import ZeroList

BASE = {
    "model": {"mass": 1.0, "b0": 2.0},
    "potential": {"phi": {"abs": 1.0, "arg": float(3 * np.pi / 4)}, "epsilon": 0.3},
    "truncation": {"n_levels": 1, "M": 2, "L": 3.0, "N": 16},
    "kdomain": {"eta": 0.25, "eps_k": 0.05},
    "search": {"backend": "matrix", "remove_free_poles": True, "sign_m": 1, "half_plane": "both",
               "region": {"r_min": 0.01, "r_max": 0.38, "theta_min": 0.001, "theta_max": 1.5697963}},
    "spectrum": {"thresholds": [1]},
}


def write(tmp_path, cfg, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(cfg) if name.endswith("yaml") else json.dumps(cfg))
    return p


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def run(tmp_path, cmd, cfg, out="out", extra=()):
    return cli.run([cmd, "--config", str(write(tmp_path, cfg)), "--out", str(tmp_path / out), *extra])


def test_spectrum_and_manifest(tmp_path):
    assert run(tmp_path, "spectrum", BASE) == 0
    man = json.loads((tmp_path / "out" / "manifest.json").read_text())
    for name, digest in man["outputs"].items():
        assert cli.sha256(tmp_path / "out" / name) == digest
    assert man["checks"]["numerical_range"] == "pass"
    assert man["truncation"]["dim"] == 2 * 2 * 16


def test_manifest_stable(tmp_path):
    run(tmp_path, "spectrum", BASE, "a")
    run(tmp_path, "spectrum", BASE, "b")
    a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert a["run_hash"] == b["run_hash"]
    assert a["outputs"] == b["outputs"]


def test_zero_coupling_spectrum_real(tmp_path):
    cfg = dict(BASE, potential=dict(BASE["potential"], epsilon=0.0))
    assert run(tmp_path, "spectrum", cfg) == 0
    assert read_csv(tmp_path / "out" / "spectrum_nonreal.csv") == []


def test_hermitian_spectrum_real(tmp_path):
    cfg = dict(BASE, potential=dict(BASE["potential"], phi=1.0))
    assert run(tmp_path, "spectrum", cfg) == 0
    assert all(abs(float(r["im"])) < 1e-8 for r in read_csv(tmp_path / "out" / "spectrum.csv"))


def test_zeros_match_spectrum(tmp_path):
    assert run(tmp_path, "spectrum", BASE, "s") == 0
    assert run(tmp_path, "zeros", BASE, "z") == 0
    eig = [complex(float(r["re"]), float(r["im"])) for r in read_csv(tmp_path / "s" / "spectrum_nonreal.csv")]
    zs = [complex(float(r["z_re"]), float(r["z_im"])) for r in read_csv(tmp_path / "z" / "zeros.csv")]
    zs = [z for z in zs if abs(z - 1) < 0.25]
    assert len(eig) == len(zs) == 2
    for z in eig:
        assert min(abs(z - w) for w in zs) < 1e-8
    plot = json.loads((tmp_path / "z" / "plot_data.json").read_text())
    assert set(plot["k_boundaries"]) == {"m+1_hp+1", "m+1_hp-1"}


def test_zeros_empty(tmp_path):
    cfg = dict(BASE, potential=dict(BASE["potential"], epsilon=0.0))
    assert run(tmp_path, "zeros", cfg) == 0
    assert read_csv(tmp_path / "out" / "zeros.csv") == []


def test_zeros_unresolved_exit(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(runs, "find_zeros", lambda *a, **k: ZeroList([], [("log", (0.0, 1.0, 0.1, 0.2))], 1))
    assert run(tmp_path, "zeros", BASE) == 2
    assert "unresolved" in capsys.readouterr().err


def test_toeplitz_closed_form(tmp_path):
    cfg = dict(BASE, truncation=dict(BASE["truncation"], M=8))
    assert run(tmp_path, "toeplitz", cfg) == 0
    rows = read_csv(tmp_path / "out" / "toeplitz.csv")
    mu = np.array([float(r["mu"]) for r in rows])
    ref = np.array([float(r["closed_form"]) for r in rows])
    assert np.max(np.abs(mu - ref) / ref) < 1e-8
    assert np.allclose(mu[1:] / mu[:-1], 0.5)


def test_toeplitz_single_state(tmp_path):
    cfg = dict(BASE, truncation=dict(BASE["truncation"], M=1))
    assert run(tmp_path, "toeplitz", cfg) == 0
    rows = read_csv(tmp_path / "out" / "toeplitz.csv")
    assert len(rows) == 1 and rows[0]["r_ell"] == ""


def test_toeplitz_strict_gap(tmp_path):
    cfg = dict(BASE, truncation=dict(BASE["truncation"], M=6), toeplitz={"nu_gap": 0.9})
    assert run(tmp_path, "toeplitz", cfg) == 0
    assert json.loads((tmp_path / "out" / "report.json").read_text())["radii"] == []


def test_bounds_ten_points(tmp_path):
    assert run(tmp_path, "bounds", BASE) == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert rep["n_points"] == 10
    assert np.isfinite(rep["C_P"]) and np.isfinite(rep["C_Q"])


def test_bounds_random_preset_seeded(tmp_path):
    cfg = dict(BASE, bounds={"random_points": 3})
    run(tmp_path, "bounds", cfg, "a", ("--seed", "4"))
    run(tmp_path, "bounds", cfg, "b", ("--seed", "4"))
    run(tmp_path, "bounds", cfg, "c", ("--seed", "5"))
    h = [json.loads((tmp_path / d / "manifest.json").read_text())["outputs"]["bounds.csv"] for d in "abc"]
    assert h[0] == h[1] != h[2]


def test_sector_check_pass(tmp_path):
    cfg = dict(BASE, potential={"phi": {"abs": 1.0, "arg": float(np.pi / 4)}, "epsilon": 0.1},
               truncation={"n_levels": 1, "M": 3, "L": 5.0, "N": 25}, kdomain={})
    cfg.pop("search")
    assert run(tmp_path, "sector-check", cfg) == 0


@pytest.mark.parametrize("cfg", [
    {"unknown": {}},
    {"potential": {"phi": 0.0}},
    {"potential": {"spinor": [[1, 0], [0, 1]]}},
    {"truncation": {"N": 1}},
    {"kdomain": {"eps_k": 0.9}},
    {"search": {"bogus": 1}},
])
def test_config_errors(tmp_path, cfg):
    assert run(tmp_path, "spectrum", cfg) == 1


def test_missing_config(tmp_path):
    assert cli.run(["spectrum", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path)]) == 1


def test_json_config(tmp_path):
    p = write(tmp_path, BASE, "cfg.json")
    assert cli.run(["toeplitz", "--config", str(p), "--out", str(tmp_path / "o")]) == 0


def test_cluster_check_bands(tmp_path):
    cfg = {"potential": {"phi": {"abs": 1.0, "arg": float(3 * np.pi / 4)}, "epsilon": 0.2},
           "truncation": {"n_levels": 1, "M": 6, "L": 5.0, "N": 25}}
    assert run(tmp_path, "cluster-check", cfg) == 0
    rows = read_csv(tmp_path / "out" / "bands.csv")
    assert [r["ell"] for r in rows] == ["0", "1", "2"]
    assert all(r["holds"] == "1" and int(r["count"]) >= int(r["toeplitz_count"]) for r in rows)


def test_cmd_functions_take_mappings(tmp_path):
    assert cli.cmd_toeplitz(BASE, tmp_path / "t") == 0
    assert cli.cmd_spectrum(BASE, tmp_path / "s") == 0
    man = json.loads((tmp_path / "s" / "manifest.json").read_text())
    assert {"config", "version", "tolerances", "truncation", "timings", "outputs", "checks"} <= set(man)
