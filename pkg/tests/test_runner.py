import json
import hashlib

import numpy as np
import pytest

from rydchain.errors import ParseError, ValidationError
from rydchain.runner import (
    grid_csv,
    parse_config,
    parse_config_text,
    read_grid_csv,
    run,
    validate_config,
    write_outputs,
)


def minimal_config(**protocol):
    proto = {"kind": "populations", "times_us": [0.0, 0.2, 0.4]}
    proto.update(protocol)
    return {"system": {"n_sites": 9}, "protocol": proto}


def test_minimal_config_gets_defaults():
    cfg = validate_config(minimal_config())
    assert cfg["drive"]["omega_mhz"] == 1.21
    assert cfg["drive"]["detuning_mhz"] == 0.22
    assert cfg["drive"]["v_nn_mhz"] == 7.3
    assert cfg["system"]["boundary"] == "open"
    assert cfg["system"]["constrained"] is True
    assert cfg["protocol"]["hamiltonian"] == "pxp"
    assert cfg["output"]["format"] == "csv"


def test_unknown_keys_rejected():
    data = minimal_config()
    data["system"]["n_site"] = 3
    data["banana"] = {}
    with pytest.raises(ValidationError) as err:
        validate_config(data)
    message = str(err.value)
    assert "system.n_site" in message and "banana" in message


def test_out_of_range_site_rejected():
    with pytest.raises(ValidationError, match="perturb_site"):
        validate_config(minimal_config(kind="otoc", perturb_site=99))


def test_duplicate_key_is_parse_error():
    text = '{"system": {"n_sites": 5, "n_sites": 6}, "protocol": {"kind": "populations", "times_us": [0]}}'
    with pytest.raises(ParseError, match="duplicate"):
        parse_config_text(text)


def test_invalid_json_is_parse_error():
    with pytest.raises(ParseError, match="line"):
        parse_config_text("{not json}")


def test_multiple_violations_reported_together():
    data = {
        "system": {"n_sites": -1},
        "protocol": {"kind": "nonsense"},
        "output": {"format": "yaml"},
    }
    with pytest.raises(ValidationError) as err:
        validate_config(data)
    assert len(err.value.violations) >= 3


def test_parse_config_file_roundtrip(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(minimal_config()))
    cfg = parse_config(path)
    assert cfg.kind == "populations"


def test_populations_run_produces_expected_files(tmp_path):
    cfg = validate_config(
        {"system": {"n_sites": 13},
         "protocol": {"kind": "populations", "times_us": [0.0, 0.1]},
         "output": {"dir": str(tmp_path)}}
    )
    manifest, files = run(cfg)
    assert set(files) == {"populations.csv", "wavefronts.csv"}
    grid = read_grid_csv(files["populations.csv"])
    assert len(grid.sites) == 13
    np.testing.assert_array_equal(grid.values[0], np.arange(13) % 2 == 0)
    manifest_path = write_outputs(files, manifest, tmp_path)
    stored = json.loads(manifest_path.read_text())
    for entry in stored["outputs"]:
        digest = hashlib.sha256((tmp_path / entry["file"]).read_bytes()).hexdigest()
        assert digest == entry["sha256"]


def test_csv_roundtrip_is_exact():
    cfg = validate_config(
        {"system": {"n_sites": 8},
         "protocol": {"kind": "otoc", "times_us": [0.0, 0.3, 0.7], "perturb_site": 4}}
    )
    _, files = run(cfg)
    text = files["otoc.csv"]
    grid = read_grid_csv(text)
    assert grid_csv(grid) == text  # values survive the %.10e round trip exactly


def test_otoc_with_noise_emits_stderr_grid():
    cfg = validate_config(
        {"system": {"n_sites": 8, "boundary": "periodic"},
         "protocol": {"kind": "otoc", "times_us": [0.0, 0.4], "perturb_site": 4},
         "initial": {"label": "zero"},
         "noise": {"n_shots": 5, "seed": 11}}
    )
    manifest, files = run(cfg)
    assert {"otoc.csv", "otoc_stderr.csv"} <= set(files)
    assert manifest.seed == 11


def test_same_seed_gives_identical_bytes():
    raw = {
        "system": {"n_sites": 8, "boundary": "periodic"},
        "protocol": {"kind": "otoc", "times_us": [0.0, 0.5], "perturb_site": 4},
        "initial": {"label": "zero"},
        "noise": {"n_shots": 6, "seed": 4},
    }
    _, first = run(validate_config(raw))
    _, second = run(validate_config(json.loads(json.dumps(raw))))
    assert first == second


def test_holevo_run_files():
    cfg = validate_config(
        {"system": {"n_sites": 9},
         "protocol": {"kind": "holevo", "times_us": [0.0, 0.3]}}
    )
    _, files = run(cfg)
    assert {"holevo.csv", "trace_distance.csv"} == set(files)
    x = read_grid_csv(files["holevo.csv"])
    assert x.values[0].max() == pytest.approx(1.0)


def test_revival_run_series():
    cfg = validate_config(
        {"system": {"n_sites": 10},
         "protocol": {"kind": "revival", "times_us": [0.0, 0.2]}}
    )
    _, files = run(cfg)
    lines = files["revival.csv"].splitlines()
    assert lines[0] == "t_us,overlap,domain_wall"
    first = [float(x) for x in lines[1].split(",")]
    assert first[1] == pytest.approx(1.0) and first[2] == pytest.approx(1.0)


def test_toy_run_produces_revival_and_holevo():
    cfg = validate_config(
        {"system": {"n_sites": 8, "boundary": "periodic", "constrained": False},
         "drive": {"omega_mhz": 1.0, "toy_j_mhz": 2.0},
         "protocol": {"kind": "toy", "times_us": [0.0, 0.25, 0.5]},
         "initial": {"label": "dicke"}}
    )
    _, files = run(cfg)
    assert {"revival.csv", "holevo.csv", "trace_distance.csv"} == set(files)
    overlap = [float(ln.split(",")[1]) for ln in files["revival.csv"].splitlines()[1:]]
    om = 2 * np.pi * 1.0
    for t, value in zip([0.0, 0.25, 0.5], overlap):
        assert value == pytest.approx(np.cos(om * t / 2) ** 16, abs=1e-9)


def test_sweep_single_value_matches_plain_run():
    base = {
        "system": {"n_sites": 8, "boundary": "periodic", "constrained": False},
        "protocol": {"kind": "otoc", "times_us": [0.0, 0.4, 0.8], "perturb_site": 4,
                     "hamiltonian": "rydberg"},
    }
    _, plain = run(validate_config(json.loads(json.dumps(base))))
    sweep_cfg = json.loads(json.dumps(base))
    sweep_cfg["protocol"].update(
        {"kind": "sweep", "sweep_axis": "v_over_omega", "sweep_values": [7.3 / 1.21]}
    )
    _, swept = run(validate_config(sweep_cfg))
    name = [n for n in swept if n.startswith("sweep_") and n.endswith("_otoc.csv")][0]
    assert swept[name] == plain["otoc.csv"]
    assert "sweep_summary.csv" in swept and "reference_pxp.csv" in swept


def test_sweep_omega_axis_fidelity_decreases():
    cfg = validate_config(
        {"system": {"n_sites": 8, "boundary": "periodic", "constrained": False},
         "protocol": {"kind": "sweep", "sweep_axis": "omega",
                      "sweep_values": [1.21, 2.0, 3.0],
                      "times_omega_t_pi": [1.0],
                      "times_us": [0.0],
                      "gap_model": "diagonal_only", "gap_time_us": 0.2,
                      "hamiltonian": "rydberg"}}
    )
    _, files = run(cfg)
    rows = [ln.split(",") for ln in files["sweep_summary.csv"].splitlines()[1:]]
    fids = [float(r[1]) for r in rows]
    assert fids[0] > fids[1] > fids[2]


def test_mitigate_kind_reads_and_divides(tmp_path):
    from rydchain.protocols import SpatioTemporalGrid
    from rydchain.runner import grid_csv as to_csv

    zz = SpatioTemporalGrid([0.0], (0, 1), [[0.45, 0.5]])
    iz = SpatioTemporalGrid([0.0], (0, 1), [[0.9, 0.01]])
    zz_path = tmp_path / "zz.csv"
    iz_path = tmp_path / "iz.csv"
    zz_path.write_text(to_csv(zz))
    iz_path.write_text(to_csv(iz))
    cfg = validate_config(
        {"system": {"n_sites": 2},
         "protocol": {"kind": "mitigate", "zz_path": str(zz_path),
                      "iz_path": str(iz_path), "floor": 0.05}}
    )
    _, files = run(cfg)
    grid = read_grid_csv(files["mitigated.csv"])
    assert grid.values[0, 0] == pytest.approx(0.5)
    assert np.isnan(grid.values[0, 1])


def test_json_output_format_bundles_grids():
    cfg = validate_config(
        {"system": {"n_sites": 8},
         "protocol": {"kind": "populations", "times_us": [0.0, 0.1]},
         "output": {"format": "json"}}
    )
    _, files = run(cfg)
    assert set(files) == {"results.json"}
    payload = json.loads(files["results.json"])
    assert "populations" in payload["grids"]
    assert payload["grids"]["populations"]["sites"] == list(range(8))


def test_time_grid_shorthand():
    cfg = validate_config(
        {"system": {"n_sites": 5},
         "protocol": {"kind": "populations",
                      "time_grid": {"start": 0.0, "stop": 1.0, "num": 5}}}
    )
    assert cfg["protocol"]["times_us"] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])


def test_window_expands_to_sites():
    cfg = validate_config(
        {"system": {"n_sites": 25},
         "protocol": {"kind": "holevo", "times_us": [0.0], "window": [6, 18]}}
    )
    assert cfg["protocol"]["sites"] == list(range(6, 19))
