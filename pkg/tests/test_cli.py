import json

import numpy as np
import pytest

from rydchain.cli import main


def write_config(tmp_path, data, name="exp.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_run_writes_outputs_and_manifest(tmp_path, capsys):
    cfg = {
        "system": {"n_sites": 9},
        "protocol": {"kind": "populations", "times_us": [0.0, 0.2]},
        "output": {"dir": str(tmp_path / "unused_default")},
    }
    out = tmp_path / "results"
    code = main(["run", "--config", str(write_config(tmp_path, cfg)), "--out", str(out)])
    assert code == 0
    assert (out / "populations.csv").exists()
    assert (out / "wavefronts.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["kind"] == "populations"
    printed = capsys.readouterr().out.strip()
    assert printed.endswith("manifest.json")


def test_run_reports_config_errors(tmp_path, capsys):
    path = write_config(tmp_path, {"system": {"n_sites": 9}, "protocol": {"kind": "nope"}})
    code = main(["run", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "protocol.kind" in capsys.readouterr().err


def test_run_duplicate_key_rejected(tmp_path, capsys):
    path = tmp_path / "dup.json"
    path.write_text(
        '{"system": {"n_sites": 5, "n_sites": 5}, '
        '"protocol": {"kind": "populations", "times_us": [0]}}'
    )
    code = main(["run", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "duplicate" in capsys.readouterr().err


def test_determinism_across_thread_counts(tmp_path):
    cfg = {
        "system": {"n_sites": 8, "boundary": "periodic"},
        "protocol": {"kind": "otoc", "times_us": [0.0, 0.4, 0.8], "perturb_site": 4},
        "initial": {"label": "zero"},
        "noise": {"n_shots": 8, "seed": 31},
    }
    path = write_config(tmp_path, cfg)
    out1, out8 = tmp_path / "t1", tmp_path / "t8"
    assert main(["run", "--config", str(path), "--out", str(out1), "--threads", "1"]) == 0
    assert main(["run", "--config", str(path), "--out", str(out8), "--threads", "8"]) == 0
    for name in ("otoc.csv", "otoc_stderr.csv"):
        assert (out1 / name).read_bytes() == (out8 / name).read_bytes()


def test_sweep_subcommand(tmp_path):
    cfg = {
        "system": {"n_sites": 8, "boundary": "periodic", "constrained": False},
        "protocol": {"kind": "otoc", "times_us": [0.0, 0.4], "perturb_site": 4,
                     "hamiltonian": "rydberg"},
    }
    path = write_config(tmp_path, cfg)
    out = tmp_path / "sweep"
    code = main([
        "sweep", "--config", str(path), "--axis", "detuning_over_vnnn",
        "--values", "0,2", "--out", str(out),
    ])
    assert code == 0
    summary = (out / "sweep_summary.csv").read_text().splitlines()
    assert summary[0] == "value,max_abs_dev_from_pxp,mean_abs_dev_from_pxp"
    assert len(summary) == 3


def test_mitigate_subcommand(tmp_path):
    zz = tmp_path / "zz.csv"
    iz = tmp_path / "iz.csv"
    zz.write_text("t_us,site_0\n0.0000000000e+00,4.5000000000e-01\n")
    iz.write_text("t_us,site_0\n0.0000000000e+00,9.0000000000e-01\n")
    out = tmp_path / "corrected.csv"
    code = main(["mitigate", "--zz", str(zz), "--iz", str(iz), "--out", str(out)])
    assert code == 0
    assert float(out.read_text().splitlines()[1].split(",")[1]) == pytest.approx(0.5)


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("RYDCHAIN_THREADS", "3")
    cfg = {
        "system": {"n_sites": 6, "boundary": "periodic"},
        "protocol": {"kind": "otoc", "times_us": [0.0], "perturb_site": 2},
        "initial": {"label": "zero"},
        "noise": {"n_shots": 2, "seed": 1},
    }
    path = write_config(tmp_path, cfg)
    out = tmp_path / "envout"
    assert main(["run", "--config", str(path), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["threads"] == 3
