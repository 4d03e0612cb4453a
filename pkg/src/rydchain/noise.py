"""Quasi-static Monte Carlo noise model, detection/depolarization transforms,
and IZ-based OTOC error mitigation.

Every noise channel is drawn once per shot. A uniform static drive phase is
gauge-equivalent to the identity within a single evolution segment, so the
sampled phase offset is physical only *between* the forward and reversed
segments: shot runners build the forward Hamiltonian at phase zero and hand
the phase-drifted operator to the reversed segment.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .basis import HilbertBasis
from .errors import ApproximationInvalid, NonPhysical, RydchainError, ShapeMismatch
from .hamiltonian import ChainGeometry, RydbergParams, SparseOperator, build_rydberg
from .protocols import (
    Butterfly,
    OtocProtocolConfig,
    PreparedEnsemble,
    SpatioTemporalGrid,
    as_ensemble,
    density_trajectory,
    run_otoc,
)


class ShotFailure(RydchainError):
    """A Monte Carlo shot raised; the message carries the shot index."""


@dataclass(frozen=True)
class NoiseParams:
    """Quasi-static channel strengths; defaults follow the calibrated hardware.

    delta_omega_rel   relative RMS of the Rabi frequency
    delta_phi         RMS drive-phase drift between evolution segments (rad)
    delta_detuning    RMS detuning offset (rad/us)
    sigma_pos         per-site position jitter (um)
    gamma             depolarization rate (1/us), applied as a post-hoc correction
    epsilon_raw       raw excited-state detection error
    eta               ground-state atom loss
    t_rydberg_lifetime  excited-state 1/e lifetime T_R (us)
    perturb_phase_sigma RMS jitter of the local pi-phase kick (rad)
    """

    delta_omega_rel: float = 0.01
    delta_phi: float = 0.08 * np.pi
    delta_detuning: float = 2 * np.pi * 0.025
    sigma_pos: float = 0.3
    gamma: float = 0.035
    epsilon_raw: float = 0.01
    eta: float = 0.01
    t_rydberg_lifetime: float = 140.0
    perturb_phase_sigma: float = 0.09 * np.pi
    n_shots: int = 200
    seed: int = 0

    def __post_init__(self):
        numeric = (
            self.delta_omega_rel,
            self.delta_phi,
            self.delta_detuning,
            self.sigma_pos,
            self.gamma,
            self.epsilon_raw,
            self.eta,
            self.t_rydberg_lifetime,
            self.perturb_phase_sigma,
        )
        if any(v < 0 for v in numeric):
            raise ValueError("noise parameters must be non-negative")
        if self.epsilon_raw > 1 or self.eta > 1:
            raise ValueError("detection probabilities must be <= 1")
        if self.n_shots < 1:
            raise ValueError("n_shots must be >= 1")

    def zeroed_evolution(self) -> "NoiseParams":
        """Copy with every evolution-noise channel off (perturbation jitter kept)."""
        return replace(
            self, delta_omega_rel=0.0, delta_phi=0.0, delta_detuning=0.0, sigma_pos=0.0
        )


@dataclass(frozen=True)
class NoiseSample:
    """One quasi-static draw, constant within a shot."""

    omega_factor: float
    detuning_offset: float
    phase_offset: float
    position_offsets: np.ndarray
    perturb_phase: float


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Counter-style per-shot stream: order-independent and reproducible."""
    return np.random.default_rng([int(seed), int(shot)])


def sample_noise(params: NoiseParams, rng: np.random.Generator, n_sites: int) -> NoiseSample:
    """Gaussian draws for each channel, in a fixed order.

    Standard-normal variates are always consumed and then scaled, so zeroing
    one channel leaves every other channel's draw unchanged (a zero-noise
    reference run sees the same perturbation phases shot for shot).
    """
    omega_factor = 1.0 + params.delta_omega_rel * rng.standard_normal()
    detuning_offset = params.delta_detuning * rng.standard_normal()
    phase_offset = params.delta_phi * rng.standard_normal()
    position_offsets = params.sigma_pos * rng.standard_normal(n_sites)
    perturb_phase = np.pi + params.perturb_phase_sigma * rng.standard_normal()
    return NoiseSample(omega_factor, detuning_offset, phase_offset, position_offsets, perturb_phase)


def noisy_hamiltonian(
    sample: NoiseSample,
    geometry: ChainGeometry,
    params: RydbergParams,
    basis: HilbertBasis,
    include_phase: bool = True,
) -> SparseOperator:
    """Rydberg operator built from one noise draw.

    The sampled drive phase enters the off-diagonal coupling as
    (omega/2) exp(-i phi) (Hermitian-completed); pass `include_phase=False`
    for the segment that serves as the phase reference.
    """
    offsets = sample.position_offsets.copy()
    if geometry.position_offsets_um is not None:
        offsets = offsets + geometry.position_offsets_um
    jittered = ChainGeometry(geometry.n_sites, geometry.spacing_um, offsets)
    drive = replace(
        params,
        omega=params.omega * sample.omega_factor,
        detuning=params.detuning + sample.detuning_offset,
    )
    phase = sample.phase_offset if include_phase else 0.0
    return build_rydberg(basis, jittered, drive, drive_phase=phase)


def monte_carlo(
    protocol_closure: Callable[[NoiseSample], SpatioTemporalGrid],
    params: NoiseParams,
    n_sites: int,
    threads: int = 1,
) -> SpatioTemporalGrid:
    """Mean and standard error of the closure's grid over `n_shots` draws.

    Shots use independent counter-derived RNG streams and are reduced in shot
    order, so results are bit-identical for any thread count.
    """

    def one_shot(shot: int) -> SpatioTemporalGrid:
        try:
            return protocol_closure(sample_noise(params, shot_rng(params.seed, shot), n_sites))
        except Exception as exc:  # noqa: BLE001 - annotate and re-raise
            raise ShotFailure(f"shot {shot} failed: {exc}") from exc

    grids = _map_shots(one_shot, params.n_shots, threads)
    if any(g.values.shape != grids[0].values.shape for g in grids):
        raise ShapeMismatch("shots returned differently shaped grids")
    values = np.stack([g.values for g in grids])
    mean = values.mean(axis=0)
    if params.n_shots > 1:
        stderr = values.std(axis=0, ddof=1) / np.sqrt(params.n_shots)
    else:
        stderr = np.zeros_like(mean)
    return SpatioTemporalGrid(grids[0].times, grids[0].sites, mean, stderr)


def monte_carlo_densities(
    closure: Callable[[NoiseSample], np.ndarray],
    params: NoiseParams,
    n_sites: int,
    threads: int = 1,
) -> np.ndarray:
    """Shot-averaged density-matrix trajectory (densities are linear in the
    state, so averaging them is the physical noise average)."""

    def one_shot(shot: int) -> np.ndarray:
        try:
            return closure(sample_noise(params, shot_rng(params.seed, shot), n_sites))
        except Exception as exc:  # noqa: BLE001
            raise ShotFailure(f"shot {shot} failed: {exc}") from exc

    stacks = _map_shots(one_shot, params.n_shots, threads)
    return np.mean(np.stack(stacks), axis=0)


def _map_shots(fn, n_shots: int, threads: int):
    if threads <= 1:
        return [fn(shot) for shot in range(n_shots)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_shots)))


def otoc_shot_closure(
    ensemble: PreparedEnsemble,
    geometry: ChainGeometry,
    drive: RydbergParams,
    basis: HilbertBasis,
    cfg: OtocProtocolConfig,
) -> Callable[[NoiseSample], SpatioTemporalGrid]:
    """OTOC run under one noise draw: forward segment at phase zero, reversed
    segment phase-drifted, local kick at the sampled perturbation phase."""
    ensemble = as_ensemble(ensemble)

    def closure(sample: NoiseSample) -> SpatioTemporalGrid:
        h_fwd = noisy_hamiltonian(sample, geometry, drive, basis, include_phase=False)
        h_bwd = noisy_hamiltonian(sample, geometry, drive, basis, include_phase=True)
        shot_cfg = cfg
        if cfg.butterfly is Butterfly.SIGMA_Z:
            shot_cfg = replace(cfg, perturb_phase=sample.perturb_phase)
        return run_otoc(ensemble, h_fwd, shot_cfg, h_backward=h_bwd)

    return closure


def populations_shot_closure(
    ensemble: PreparedEnsemble,
    geometry: ChainGeometry,
    drive: RydbergParams,
    basis: HilbertBasis,
    times: Sequence[float],
) -> Callable[[NoiseSample], SpatioTemporalGrid]:
    from .protocols import run_populations

    ensemble = as_ensemble(ensemble)

    def closure(sample: NoiseSample) -> SpatioTemporalGrid:
        h = noisy_hamiltonian(sample, geometry, drive, basis, include_phase=False)
        return run_populations(ensemble, h, times)

    return closure


def holevo_shot_closure(
    ensemble: PreparedEnsemble,
    geometry: ChainGeometry,
    drive: RydbergParams,
    basis: HilbertBasis,
    times: Sequence[float],
    sites: Sequence[int],
) -> Callable[[NoiseSample], np.ndarray]:
    ensemble = as_ensemble(ensemble)

    def closure(sample: NoiseSample) -> np.ndarray:
        h = noisy_hamiltonian(sample, geometry, drive, basis, include_phase=False)
        return density_trajectory(ensemble, h, times, sites)

    return closure


def _epsilon_of_time(params: NoiseParams, gap_times: np.ndarray) -> np.ndarray:
    decay = 1.0 - np.exp(-gap_times / params.t_rydberg_lifetime)
    return params.epsilon_raw + (1.0 - params.epsilon_raw) * decay


def apply_detection(
    grid: SpatioTemporalGrid,
    params: NoiseParams,
    gap_times: Optional[Sequence[float]] = None,
    inverse: bool = False,
) -> SpatioTemporalGrid:
    """Detection transform on an excitation-probability grid.

    Forward mode maps true populations to measured ones via
    P(down) = eps (1 - eta) P'(up) + (1 - eta) P'(down), with the excited-state
    error eps = eps_raw + (1 - eps_raw)(1 - exp(-t_i / T_R)) accumulating over
    the per-time readout gap t_i. Inverse mode undoes it; corrected values
    outside [0, 1] but within 0.05 are clamped with a warning, anything worse
    raises.
    """
    t_i = np.zeros(grid.times.size) if gap_times is None else np.asarray(gap_times, float)
    if t_i.size != grid.times.size:
        raise ShapeMismatch("gap_times must have one entry per grid time")
    eps = _epsilon_of_time(params, t_i)[:, None]
    eta = params.eta
    p = grid.values
    if not inverse:
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise NonPhysical("populations must lie in [0, 1]")
        measured_down = eps * (1 - eta) * p + (1 - eta) * (1 - p)
        out = 1.0 - measured_down
    else:
        # forward mode gives p_meas(up) = eta + (1-eta)(1-eps) p'
        out = (p - eta) / ((1 - eta) * (1 - eps))
        if np.any(out < -0.05) or np.any(out > 1.05):
            raise NonPhysical("inverse detection correction left [-0.05, 1.05]")
        if np.any(out < 0) or np.any(out > 1):
            warnings.warn("inverse detection correction clamped into [0, 1]", stacklevel=2)
            out = np.clip(out, 0.0, 1.0)
    return SpatioTemporalGrid(grid.times, grid.sites, out, grid.stderr)


def apply_depolarization(grid: SpatioTemporalGrid, gamma: float, times=None) -> SpatioTemporalGrid:
    """Forward model of excited-state decay: the measured ground population
    gains gamma*t, i.e. the excitation probability loses it."""
    t = grid.times if times is None else np.asarray(times, float)
    _depolarization_guard(gamma, t)
    return SpatioTemporalGrid(grid.times, grid.sites, grid.values - gamma * t[:, None], grid.stderr)


def depolarization_correct(grid: SpatioTemporalGrid, gamma: float, times=None) -> SpatioTemporalGrid:
    """First-order decay correction: subtract the accumulated gamma*t from the
    ground population (equivalently add it to the excitation probability)."""
    t = grid.times if times is None else np.asarray(times, float)
    _depolarization_guard(gamma, t)
    return SpatioTemporalGrid(grid.times, grid.sites, grid.values + gamma * t[:, None], grid.stderr)


def _depolarization_guard(gamma: float, times: np.ndarray) -> None:
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if times.size and gamma * float(np.max(times)) >= 0.5:
        raise ApproximationInvalid(
            "gamma * t reaches 0.5; the first-order depolarization correction is invalid"
        )


def mitigate_otoc(
    zz: SpatioTemporalGrid, iz: SpatioTemporalGrid, floor: float = 0.05
) -> SpatioTemporalGrid:
    """Elementwise ZZ/IZ ratio; entries with |IZ| below `floor` become NaN
    (near-zero reference values would blow up the corrected result)."""
    if zz.values.shape != iz.values.shape:
        raise ShapeMismatch("ZZ and IZ grids differ in shape")
    invalid = np.abs(iz.values) < floor
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(invalid, np.nan, zz.values / np.where(invalid, 1.0, iz.values))
    return SpatioTemporalGrid(zz.times, zz.sites, ratio, None)
