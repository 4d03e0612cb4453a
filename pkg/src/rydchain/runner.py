"""Batch experiment runner: strict JSON config -> protocol dispatch -> CSV
grids plus a checksummed manifest.

Config frequencies are plain MHz (the internal angular value is 2*pi times
that); times are microseconds. Grid CSVs carry a "t_us,site_<i>,..." header
and fixed %.10e values; runner outputs are quantised to that representation,
so reading a CSV back reproduces the in-memory grid exactly.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import time as _time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .basis import BoundaryCondition, build_basis
from .errors import ConfigInvalid, ParseError, ValidationError
from .hamiltonian import ChainGeometry, RydbergParams, SparseOperator, build_pxp, build_rydberg, build_toy
from .noise import (
    NoiseParams,
    holevo_shot_closure,
    mitigate_otoc,
    monte_carlo,
    monte_carlo_densities,
    otoc_shot_closure,
    populations_shot_closure,
)
from .protocols import (
    Butterfly,
    ErrorModel,
    GapModel,
    OtocProtocolConfig,
    PreparedEnsemble,
    Reversal,
    SiteConvention,
    SpatioTemporalGrid,
    StateLabel,
    as_ensemble,
    central_flip_site,
    detect_wavefronts,
    holevo_from_trajectories,
    prepare_error_mixture,
    prepare_state,
    run_holevo,
    run_otoc,
    run_populations,
    run_reversal_fidelity,
    run_z2_revival,
)

TWO_PI = 2.0 * np.pi
FLOAT_FORMAT = "%.10e"

_SCHEMA = {
    "system": {
        "n_sites": None,
        "boundary": "open",
        "constrained": True,
        "spacing_um": 7.0,
        "position_offsets_um": None,
    },
    "drive": {
        "omega_mhz": 1.21,
        "detuning_mhz": 0.22,
        "v_nn_mhz": 7.3,
        "interaction_cutoff": None,
        "toy_j_mhz": 2.0,
    },
    "protocol": {
        "kind": None,
        "hamiltonian": None,
        "times_us": None,
        "time_grid": None,
        "sites": None,
        "window": None,
        "perturb_site": None,
        "flip_site": None,
        "perturb_phase_pi": 1.0,
        "butterfly": "sigma_z",
        "reversal": "global_z_sandwich",
        "gap_model": "none",
        "gap_time_us": 0.2,
        "site_convention": "fixed",
        "tomography": False,
        "sweep_axis": None,
        "sweep_values": None,
        "times_omega_t_pi": None,
        "zz_path": None,
        "iz_path": None,
        "floor": 0.05,
    },
    "initial": {
        "label": "z2",
        "fidelity": 1.0,
        "error_model": "uniform_up_flip",
        "microstate_table_path": None,
    },
    "noise": {
        "delta_omega_rel": 0.01,
        "delta_phi_pi": 0.08,
        "delta_detuning_mhz": 0.025,
        "sigma_pos_um": 0.3,
        "gamma_per_us": 0.035,
        "epsilon": 0.01,
        "eta": 0.01,
        "t_rydberg_lifetime_us": 140.0,
        "perturb_phase_sigma_pi": 0.09,
        "n_shots": 200,
        "seed": 0,
    },
    "output": {"dir": "results", "format": "csv"},
}

_KINDS = ("populations", "otoc", "holevo", "revival", "toy", "reversal", "sweep", "mitigate")
_SWEEP_AXES = ("v_over_omega", "detuning_over_vnnn", "omega")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration; `raw` is the fully defaulted dict echo."""

    raw: dict

    def __getitem__(self, key):
        return self.raw[key]

    @property
    def kind(self) -> str:
        return self.raw["protocol"]["kind"]


@dataclass
class ResultManifest:
    tool: str
    version: str
    kind: str
    seed: Optional[int]
    threads: int
    wall_clock_s: float
    config: dict
    outputs: List[dict]

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n"


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ParseError(f"duplicate key {key!r} in config")
        seen[key] = value
    return seen


def parse_config_text(text: str) -> ExperimentConfig:
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except ParseError:
        raise
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError("config root must be a JSON object")
    return validate_config(data)


def parse_config(path) -> ExperimentConfig:
    """Read, parse and validate a JSON config file."""
    return parse_config_text(Path(path).read_text())


def validate_config(data: dict) -> ExperimentConfig:
    """Fill defaults and check the schema; unknown keys are rejected and every
    violation is reported at once."""
    violations: List[str] = []
    merged: dict = {}
    for section, defaults in _SCHEMA.items():
        given = data.get(section)
        if given is None:
            given = {}
        if not isinstance(given, dict):
            violations.append(f"{section}: must be an object")
            given = {}
        for key in given:
            if key not in defaults:
                violations.append(f"{section}.{key}: unknown key")
        merged[section] = {k: given.get(k, v) for k, v in defaults.items()}
    for section in data:
        if section not in _SCHEMA:
            violations.append(f"{section}: unknown section")
    if "noise" not in data or data.get("noise") is None:
        merged["noise"] = None

    sys_cfg = merged["system"]
    n = sys_cfg.get("n_sites")
    if not isinstance(n, int) or n < 1:
        violations.append("system.n_sites: required positive integer")
        n = 1
    if sys_cfg["boundary"] not in ("open", "periodic"):
        violations.append("system.boundary: must be 'open' or 'periodic'")
    if sys_cfg["position_offsets_um"] is not None:
        offs = sys_cfg["position_offsets_um"]
        if not isinstance(offs, list) or len(offs) != n:
            violations.append("system.position_offsets_um: needs one entry per site")

    proto = merged["protocol"]
    if proto["kind"] not in _KINDS:
        violations.append(f"protocol.kind: must be one of {_KINDS}")
    times = proto["times_us"]
    if times is None and proto["time_grid"] is not None:
        tg = proto["time_grid"]
        if not isinstance(tg, dict) or not {"start", "stop", "num"} <= set(tg):
            violations.append("protocol.time_grid: needs start, stop, num")
        else:
            times = np.linspace(tg["start"], tg["stop"], int(tg["num"])).tolist()
    if times is not None:
        if not isinstance(times, list) or any(t < 0 for t in times):
            violations.append("protocol.times_us: must be a list of non-negative times")
    elif proto["kind"] not in ("mitigate",):
        violations.append("protocol.times_us or protocol.time_grid: required")
    proto["times_us"] = times
    if proto["window"] is not None and proto["sites"] is None:
        lo, hi = proto["window"]
        proto["sites"] = list(range(int(lo), int(hi) + 1))
    for key in ("perturb_site", "flip_site"):
        site = proto[key]
        if site is not None and not (0 <= site < n):
            violations.append(f"protocol.{key}: site {site} outside the {n}-site chain")
    if proto["sites"] is not None and any(not 0 <= s < n for s in proto["sites"]):
        violations.append("protocol.sites: sites outside the chain")
    if proto["butterfly"] not in ("sigma_z", "identity"):
        violations.append("protocol.butterfly: must be 'sigma_z' or 'identity'")
    if proto["reversal"] not in ("global_z_sandwich", "exact_negation"):
        violations.append("protocol.reversal: invalid")
    if proto["gap_model"] not in ("none", "diagonal_only"):
        violations.append("protocol.gap_model: invalid")
    if proto["site_convention"] not in ("fixed", "measured_up"):
        violations.append("protocol.site_convention: invalid")
    if proto["kind"] == "sweep":
        if proto["sweep_axis"] not in _SWEEP_AXES:
            violations.append(f"protocol.sweep_axis: must be one of {_SWEEP_AXES}")
        values = proto["sweep_values"]
        if not isinstance(values, list) or not values:
            violations.append("protocol.sweep_values: non-empty list required")
        elif proto["sweep_axis"] in ("v_over_omega", "omega") and any(v <= 0 for v in values):
            violations.append("protocol.sweep_values: axis values must be positive")
        elif proto["sweep_axis"] == "detuning_over_vnnn" and any(v < 0 for v in values):
            violations.append("protocol.sweep_values: detuning multiples must be >= 0")
    if proto["kind"] == "mitigate":
        for key in ("zz_path", "iz_path"):
            if not proto[key]:
                violations.append(f"protocol.{key}: required for mitigate runs")
            elif not Path(proto[key]).exists():
                violations.append(f"protocol.{key}: file {proto[key]} does not exist")
    if proto["hamiltonian"] is None:
        proto["hamiltonian"] = "toy" if proto["kind"] == "toy" else (
            "pxp" if sys_cfg["constrained"] else "rydberg"
        )
    if proto["hamiltonian"] not in ("pxp", "rydberg", "toy"):
        violations.append("protocol.hamiltonian: must be pxp, rydberg or toy")

    init = merged["initial"]
    if init["label"] not in ("z2", "zero", "z2_flip_center", "dicke"):
        violations.append("initial.label: invalid")
    if not 0.0 < float(init["fidelity"]) <= 1.0:
        violations.append("initial.fidelity: must be in (0, 1]")
    if init["error_model"] not in ("uniform_up_flip", "microstate_table"):
        violations.append("initial.error_model: invalid")
    if init["error_model"] == "microstate_table" and float(init["fidelity"]) < 1.0:
        path = init["microstate_table_path"]
        if not path or not Path(path).exists():
            violations.append("initial.microstate_table_path: file required and must exist")

    out = merged["output"]
    if out["format"] not in ("csv", "json"):
        violations.append("output.format: must be 'csv' or 'json'")

    if violations:
        raise ValidationError(violations)
    return ExperimentConfig(merged)


# ----------------------------------------------------------------------------
# system assembly


def _mhz(value: float) -> float:
    return TWO_PI * float(value)


def _build_system(cfg: ExperimentConfig):
    sys_cfg = cfg["system"]
    boundary = BoundaryCondition(sys_cfg["boundary"])
    basis = build_basis(sys_cfg["n_sites"], boundary, sys_cfg["constrained"])
    offsets = sys_cfg["position_offsets_um"]
    geometry = ChainGeometry(
        sys_cfg["n_sites"],
        sys_cfg["spacing_um"],
        np.asarray(offsets, float) if offsets is not None else None,
    )
    drive = cfg["drive"]
    params = RydbergParams(
        omega=_mhz(drive["omega_mhz"]),
        detuning=_mhz(drive["detuning_mhz"]),
        v_nn=_mhz(drive["v_nn_mhz"]),
        interaction_cutoff=drive["interaction_cutoff"],
    )
    return basis, geometry, params


def _build_hamiltonian(cfg: ExperimentConfig, basis, geometry, params) -> SparseOperator:
    proto = cfg["protocol"]
    if proto["hamiltonian"] == "pxp":
        return build_pxp(basis, params.omega)
    if proto["hamiltonian"] == "rydberg":
        return build_rydberg(basis, geometry, params)
    return build_toy(
        basis.n_sites, params.omega, _mhz(cfg["drive"]["toy_j_mhz"]), basis.boundary
    )


def _initial_ensemble(cfg: ExperimentConfig, basis) -> PreparedEnsemble:
    init = cfg["initial"]
    label = StateLabel(init["label"])
    fidelity = float(init["fidelity"])
    if label is StateLabel.Z2 and fidelity < 1.0:
        table = None
        model = ErrorModel(init["error_model"])
        if model is ErrorModel.MICROSTATE_TABLE:
            table = _read_microstate_table(init["microstate_table_path"])
        return prepare_error_mixture(basis, fidelity, model, table)
    if fidelity < 1.0:
        raise ConfigInvalid("error mixtures are defined for the z2 label only")
    return as_ensemble(prepare_state(label, basis))


def _read_microstate_table(path) -> List[Tuple[int, float]]:
    rows: List[Tuple[int, float]] = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, count = line.split(",")
        rows.append((int(word, 0) if word.startswith("0") else int(word), float(count)))
    return rows


def _noise_params(cfg: ExperimentConfig, seed: Optional[int]) -> Optional[NoiseParams]:
    block = cfg["noise"]
    if block is None:
        return None
    return NoiseParams(
        delta_omega_rel=block["delta_omega_rel"],
        delta_phi=np.pi * block["delta_phi_pi"],
        delta_detuning=_mhz(block["delta_detuning_mhz"]),
        sigma_pos=block["sigma_pos_um"],
        gamma=block["gamma_per_us"],
        epsilon_raw=block["epsilon"],
        eta=block["eta"],
        t_rydberg_lifetime=block["t_rydberg_lifetime_us"],
        perturb_phase_sigma=np.pi * block["perturb_phase_sigma_pi"],
        n_shots=block["n_shots"],
        seed=block["seed"] if seed is None else seed,
    )


def _otoc_cfg(cfg: ExperimentConfig, basis) -> OtocProtocolConfig:
    proto = cfg["protocol"]
    return OtocProtocolConfig(
        times=proto["times_us"],
        perturb_site=proto["perturb_site"],
        perturb_phase=np.pi * proto["perturb_phase_pi"],
        measure_sites=proto["sites"],
        butterfly=Butterfly(proto["butterfly"]),
        reversal=Reversal(proto["reversal"]),
        gap_model=GapModel(proto["gap_model"]),
        gap_time=proto["gap_time_us"],
        site_convention=SiteConvention(proto["site_convention"]),
    ).validated(basis)


# ----------------------------------------------------------------------------
# execution


@dataclass
class RunResult:
    kind: str
    grids: Dict[str, SpatioTemporalGrid] = field(default_factory=dict)
    series: Dict[str, Tuple[np.ndarray, Dict[str, np.ndarray]]] = field(default_factory=dict)
    tables: Dict[str, str] = field(default_factory=dict)  # pre-rendered CSV text


def execute(cfg: ExperimentConfig, seed: Optional[int] = None, threads: int = 1) -> RunResult:
    """Run the configured protocol and return grids/series in memory."""
    kind = cfg.kind
    result = RunResult(kind)
    if kind == "mitigate":
        zz = read_grid_csv(Path(cfg["protocol"]["zz_path"]).read_text())
        iz = read_grid_csv(Path(cfg["protocol"]["iz_path"]).read_text())
        result.grids["mitigated"] = mitigate_otoc(zz, iz, cfg["protocol"]["floor"])
        return result

    basis, geometry, params = _build_system(cfg)
    h = _build_hamiltonian(cfg, basis, geometry, params)
    basis = h.basis  # the toy chain builds its own full basis
    noise = _noise_params(cfg, seed)
    proto = cfg["protocol"]
    times = np.asarray(proto["times_us"], dtype=float)
    sites = tuple(proto["sites"]) if proto["sites"] is not None else tuple(range(basis.n_sites))

    if kind == "populations":
        ensemble = _initial_ensemble(cfg, basis)
        if noise is None:
            grid = run_populations(ensemble, h, times)
        else:
            closure = populations_shot_closure(ensemble, geometry, params, basis, times)
            grid = monte_carlo(closure, noise, basis.n_sites, threads)
        result.grids["populations"] = grid
        result.tables["wavefronts"] = wavefronts_csv(detect_wavefronts(grid))
    elif kind == "otoc":
        ensemble = _initial_ensemble(cfg, basis)
        ocfg = _otoc_cfg(cfg, basis)
        if noise is None:
            result.grids["otoc"] = run_otoc(ensemble, h, ocfg)
        else:
            closure = otoc_shot_closure(ensemble, geometry, params, basis, ocfg)
            result.grids["otoc"] = monte_carlo(closure, noise, basis.n_sites, threads)
    elif kind in ("holevo", "toy"):
        flip = proto["flip_site"]
        if flip is None:
            flip = central_flip_site(basis.n_sites)
        base_label = StateLabel.DICKE if kind == "toy" else StateLabel(cfg["initial"]["label"])
        base = _initial_ensemble(cfg, basis) if base_label is StateLabel.Z2 else as_ensemble(
            prepare_state(base_label, basis)
        )
        if noise is None:
            x_grid, d_grid = run_holevo(
                basis, h, times, sites, flip, base=base, tomography=proto["tomography"]
            )
        else:
            from .protocols import flip_ensemble

            traj = monte_carlo_densities(
                holevo_shot_closure(base, geometry, params, basis, times, sites),
                noise, basis.n_sites, threads,
            )
            traj_p = monte_carlo_densities(
                holevo_shot_closure(flip_ensemble(base, flip), geometry, params, basis, times, sites),
                noise, basis.n_sites, threads,
            )
            x_grid, d_grid = holevo_from_trajectories(traj, traj_p, times, sites)
        result.grids["holevo"] = x_grid
        result.grids["trace_distance"] = d_grid
        if kind == "toy":
            psi0 = prepare_state(StateLabel.DICKE, basis)
            series = run_z2_revival(psi0, h, times)
            result.series["revival"] = (times, {"overlap": series.overlap,
                                                "domain_wall": series.domain_wall})
    elif kind == "revival":
        ensemble = _initial_ensemble(cfg, basis)
        if len(ensemble.members) != 1:
            raise ConfigInvalid("revival runs take a pure initial state")
        series = run_z2_revival(ensemble.members[0][1], h, times, proto["sites"])
        result.series["revival"] = (times, {"overlap": series.overlap,
                                            "domain_wall": series.domain_wall})
    elif kind == "reversal":
        ensemble = _initial_ensemble(cfg, basis)
        if len(ensemble.members) != 1:
            raise ConfigInvalid("reversal runs take a pure initial state")
        fid = run_reversal_fidelity(
            ensemble.members[0][1], h, times,
            Reversal(proto["reversal"]), GapModel(proto["gap_model"]), proto["gap_time_us"],
        )
        result.series["reversal_fidelity"] = (times, {"fidelity": fid})
    elif kind == "sweep":
        _execute_sweep(cfg, result, seed, threads)
    else:  # pragma: no cover - the schema guards kinds
        raise ConfigInvalid(f"unhandled protocol kind {kind}")
    return result


def _sweep_times(cfg: ExperimentConfig, omega: float) -> np.ndarray:
    proto = cfg["protocol"]
    if proto["times_omega_t_pi"] is not None:
        return np.asarray([np.pi * x / omega for x in proto["times_omega_t_pi"]], dtype=float)
    return np.asarray(proto["times_us"], dtype=float)


def _execute_sweep(cfg: ExperimentConfig, result: RunResult, seed, threads) -> None:
    """Run the embedded protocol per axis value and summarise.

    OTOC axes report the maximum absolute deviation from the matching ideal
    constrained-chain (PXP) run; the omega axis reports mean reversed-echo
    fidelity at fixed omega*t targets.
    """
    proto = cfg["protocol"]
    axis = proto["sweep_axis"]
    values = proto["sweep_values"]
    sys_cfg = cfg["system"]
    boundary = BoundaryCondition(sys_cfg["boundary"])
    summary_rows: List[Tuple[float, float]] = []

    if axis == "omega":
        for value in values:
            omega = _mhz(value)
            drive = dict(cfg["drive"])
            drive["omega_mhz"] = value
            drive["v_nn_mhz"] = 6.0 * value
            drive["detuning_mhz"] = 2.0 * drive["v_nn_mhz"] / 64.0
            sub = _with_blocks(cfg, drive=drive)
            basis, geometry, params = _build_system(sub)
            h = build_rydberg(basis, geometry, params)
            ensemble = _initial_ensemble(sub, basis)
            times = _sweep_times(sub, omega)
            fid = run_reversal_fidelity(
                ensemble.members[0][1], h, times,
                Reversal(proto["reversal"]), GapModel(proto["gap_model"]), proto["gap_time_us"],
            )
            result.series[f"sweep_{_fmt_value(value)}_reversal"] = (times, {"fidelity": fid})
            summary_rows.append((value, (float(np.mean(fid)),)))
        result.tables["sweep_summary"] = summary_csv(summary_rows, ("mean_fidelity",))
        return

    # OTOC axes: compare against the ideal constrained-chain run
    pxp_basis = build_basis(sys_cfg["n_sites"], boundary, constrained=True)
    base_params = RydbergParams(
        omega=_mhz(cfg["drive"]["omega_mhz"]),
        detuning=_mhz(cfg["drive"]["detuning_mhz"]),
        v_nn=_mhz(cfg["drive"]["v_nn_mhz"]),
        interaction_cutoff=cfg["drive"]["interaction_cutoff"],
    )
    h_pxp = build_pxp(pxp_basis, base_params.omega)
    ocfg_ref = _otoc_cfg(cfg, pxp_basis)
    ref = run_otoc(_initial_ensemble(cfg, pxp_basis), h_pxp, ocfg_ref)
    result.grids["reference_pxp"] = ref

    for value in values:
        drive = dict(cfg["drive"])
        if axis == "v_over_omega":
            drive["v_nn_mhz"] = value * drive["omega_mhz"]
        else:  # detuning_over_vnnn
            drive["detuning_mhz"] = value * drive["v_nn_mhz"] / 64.0
        sub = _with_blocks(cfg, drive=drive)
        basis, geometry, params = _build_system(sub)
        h = build_rydberg(basis, geometry, params)
        ensemble = _initial_ensemble(sub, basis)
        grid = run_otoc(ensemble, h, _otoc_cfg(sub, basis))
        result.grids[f"sweep_{_fmt_value(value)}_otoc"] = grid
        dev = np.abs(grid.values - ref.values)
        summary_rows.append((value, (float(dev.max()), float(dev.mean()))))
    result.tables["sweep_summary"] = summary_csv(
        summary_rows, ("max_abs_dev_from_pxp", "mean_abs_dev_from_pxp")
    )


def _fmt_value(value) -> str:
    return f"{float(value):g}".replace(".", "p").replace("-", "m")


def _with_blocks(cfg: ExperimentConfig, **blocks) -> ExperimentConfig:
    raw = {k: (dict(v) if isinstance(v, dict) else v) for k, v in cfg.raw.items()}
    for name, block in blocks.items():
        raw[name] = block
    return ExperimentConfig(raw)


# ----------------------------------------------------------------------------
# CSV / manifest IO


def _quantize(values: np.ndarray) -> np.ndarray:
    flat = np.array([float(FLOAT_FORMAT % v) for v in np.asarray(values, float).ravel()])
    return flat.reshape(np.shape(values))


def grid_csv(grid: SpatioTemporalGrid) -> str:
    buf = io.StringIO()
    buf.write("t_us," + ",".join(f"site_{s}" for s in grid.sites) + "\n")
    for k, t in enumerate(grid.times):
        row = [FLOAT_FORMAT % t] + [FLOAT_FORMAT % v for v in grid.values[k]]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def series_csv(times: np.ndarray, columns: Dict[str, np.ndarray]) -> str:
    buf = io.StringIO()
    buf.write("t_us," + ",".join(columns) + "\n")
    for k, t in enumerate(times):
        row = [FLOAT_FORMAT % t] + [FLOAT_FORMAT % columns[name][k] for name in columns]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def wavefronts_csv(crossings) -> str:
    buf = io.StringIO()
    buf.write("bond,t_start_us,t_end_us\n")
    for bond, intervals in crossings:
        for lo, hi in intervals:
            buf.write(f"{bond},{FLOAT_FORMAT % lo},{FLOAT_FORMAT % hi}\n")
    return buf.getvalue()


def summary_csv(rows, metric_names) -> str:
    buf = io.StringIO()
    buf.write("value," + ",".join(metric_names) + "\n")
    for value, metrics in rows:
        buf.write(",".join([FLOAT_FORMAT % value] + [FLOAT_FORMAT % m for m in metrics]) + "\n")
    return buf.getvalue()


def read_grid_csv(text: str) -> SpatioTemporalGrid:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    if header[0] != "t_us" or any(not c.startswith("site_") for c in header[1:]):
        raise ParseError("not a grid CSV (expected 't_us,site_<i>,...' header)")
    sites = [int(c[len("site_"):]) for c in header[1:]]
    rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
    data = np.asarray(rows, dtype=float)
    return SpatioTemporalGrid(data[:, 0], tuple(sites), data[:, 1:])


def render_files(result: RunResult, cfg: ExperimentConfig) -> Dict[str, str]:
    """Serialise every grid/series to its output file content (no manifest)."""
    files: Dict[str, str] = {}
    quantized_grids = {
        name: SpatioTemporalGrid(
            _quantize(g.times), g.sites, _quantize(g.values),
            _quantize(g.stderr) if g.stderr is not None else None,
        )
        for name, g in result.grids.items()
    }
    if cfg["output"]["format"] == "json":
        payload = {"grids": {}, "series": {}}
        for name, g in quantized_grids.items():
            entry = {"times": g.times.tolist(), "sites": list(g.sites),
                     "values": g.values.tolist()}
            if g.stderr is not None and np.any(g.stderr):
                entry["stderr"] = g.stderr.tolist()
            payload["grids"][name] = entry
        for name, (times, cols) in result.series.items():
            payload["series"][name] = {
                "times": _quantize(times).tolist(),
                **{k: _quantize(v).tolist() for k, v in cols.items()},
            }
        for name, text in result.tables.items():
            payload.setdefault("tables", {})[name] = text
        files["results.json"] = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        return files
    for name, g in quantized_grids.items():
        files[f"{name}.csv"] = grid_csv(g)
        if g.stderr is not None and np.any(g.stderr):
            files[f"{name}_stderr.csv"] = grid_csv(
                SpatioTemporalGrid(g.times, g.sites, g.stderr)
            )
    for name, (times, cols) in result.series.items():
        files[f"{name}.csv"] = series_csv(_quantize(times), {k: _quantize(v) for k, v in cols.items()})
    for name, text in result.tables.items():
        files[f"{name}.csv"] = text
    return files


def build_manifest(
    cfg: ExperimentConfig,
    files: Dict[str, str],
    seed: Optional[int],
    threads: int,
    wall_clock_s: float,
) -> ResultManifest:
    outputs = [
        {"file": name, "sha256": hashlib.sha256(content.encode()).hexdigest(),
         "bytes": len(content.encode())}
        for name, content in sorted(files.items())
    ]
    return ResultManifest(
        tool="rydchain",
        version=__version__,
        kind=cfg.kind,
        seed=seed,
        threads=threads,
        wall_clock_s=wall_clock_s,
        config=cfg.raw,
        outputs=outputs,
    )


def write_outputs(files: Dict[str, str], manifest: ResultManifest, out_dir) -> Path:
    """Write data files first, then the manifest atomically (tmp + rename)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in sorted(files.items()):
        (out / name).write_text(content)
    manifest_path = out / "manifest.json"
    tmp = out / ".manifest.json.tmp"
    tmp.write_text(manifest.to_json())
    os.replace(tmp, manifest_path)
    return manifest_path


def run(
    cfg: ExperimentConfig,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> Tuple[ResultManifest, Dict[str, str]]:
    """Execute a config and return (manifest, file contents)."""
    threads = threads if threads is not None else _env_threads()
    started = _time.perf_counter()
    result = execute(cfg, seed=seed, threads=threads)
    files = render_files(result, cfg)
    wall = _time.perf_counter() - started
    effective_seed = seed
    if effective_seed is None and cfg["noise"] is not None:
        effective_seed = cfg["noise"]["seed"]
    manifest = build_manifest(cfg, files, effective_seed, threads, wall)
    return manifest, files


def _env_threads() -> int:
    raw = os.environ.get("RYDCHAIN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
