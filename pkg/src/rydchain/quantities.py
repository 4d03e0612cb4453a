"""Single-site information quantities.

Basis ordering for 2x2 matrices is (down, up), i.e. element [1, 1] is the
excitation probability. Entropies are in bits (log base 2), so the Holevo
information of a pair of single-qubit states lives in [0, 1].

Convention for the tomography-style reconstruction: the parity-oscillation
amplitude A equals |<sigma^y>| / 2, so that
rho = (I + (2 P_up - 1) sigma^z) / 2 + sign * A * sigma^y holds verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import (
    InvalidDensity,
    NonPhysicalDensity,
    WeightSumInvalid,
    WindowTooSmall,
)
from .evolve import StateVector

# Pauli matrices in (down, up) ordering.
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)

_EIG_CLAMP = 1e-9


@dataclass(frozen=True)
class SingleSiteDensity:
    """2x2 Hermitian, unit-trace density matrix of one site."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))
        if self.matrix.shape != (2, 2):
            raise InvalidDensity("density matrix must be 2x2")

    def validate(self) -> None:
        m = self.matrix
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise InvalidDensity("density matrix is not Hermitian")
        if abs(m.trace().real - 1.0) > 1e-10 or abs(m.trace().imag) > 1e-12:
            raise InvalidDensity("density matrix trace differs from 1")
        lo, hi = self.eigenvalues()
        if lo < -_EIG_CLAMP or hi > 1.0 + _EIG_CLAMP:
            raise InvalidDensity("density matrix eigenvalues outside [0, 1]")

    def eigenvalues(self) -> Tuple[float, float]:
        """Closed-form eigenvalues (ascending) of the 2x2 Hermitian matrix."""
        m = self.matrix
        half_tr = 0.5 * m.trace().real
        r = np.hypot(0.5 * (m[0, 0].real - m[1, 1].real), abs(m[0, 1]))
        return half_tr - r, half_tr + r

    def expectation(self, pauli: np.ndarray) -> float:
        return float(np.trace(self.matrix @ pauli).real)

    @property
    def p_up(self) -> float:
        return float(self.matrix[1, 1].real)


def _site_pairs(basis, site: int):
    """Index pairs (down-config, up-config) that differ only at `site`, both in basis."""
    key = ("rdm_pairs", site)
    cached = basis._caches.get(key)
    if cached is None:
        flip = basis.flip_map(site)
        down = np.nonzero((basis.bits[:, site] == 0) & (flip >= 0))[0]
        cached = (down, flip[down])
        basis._caches[key] = cached
    return cached


def reduced_density(psi: StateVector, site: int) -> SingleSiteDensity:
    """Exact partial trace over all sites but `site`.

    Works on constrained bases: the trace runs over in-basis configurations
    only, and coherences pair configurations related by an allowed flip.
    """
    amps = psi.amplitudes
    bit = psi.basis.bits[:, site].astype(bool)
    p_up = float(np.sum(np.abs(amps[bit]) ** 2))
    p_down = float(np.sum(np.abs(amps[~bit]) ** 2))
    down_idx, up_idx = _site_pairs(psi.basis, site)
    coh = complex(np.sum(amps[down_idx] * np.conj(amps[up_idx])))
    return SingleSiteDensity(np.array([[p_down, coh], [np.conj(coh), p_up]]))


def ensemble_density(
    states: Sequence[Tuple[float, StateVector]], site: int
) -> SingleSiteDensity:
    """Weighted sum of per-state reduced densities."""
    weights = np.array([w for w, _ in states], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise WeightSumInvalid("weights must be non-negative and sum to 1")
    total = np.zeros((2, 2), dtype=complex)
    for w, psi in states:
        total += w * reduced_density(psi, site).matrix
    return SingleSiteDensity(total)


def _entropy_from_eigs(lo: float, hi: float) -> float:
    s = 0.0
    for lam in (lo, hi):
        if lam < -_EIG_CLAMP or lam > 1.0 + _EIG_CLAMP:
            raise InvalidDensity(f"eigenvalue {lam} outside [0, 1]")
        lam = min(max(lam, 0.0), 1.0)
        if lam > 0.0:
            s -= lam * np.log2(lam)
    return float(s)


def von_neumann_entropy(rho: SingleSiteDensity) -> float:
    """-Tr(rho log2 rho) in bits; eigenvalues within -1e-9 of zero are clamped."""
    return _entropy_from_eigs(*rho.eigenvalues())


def holevo(rho: SingleSiteDensity, rho_prime: SingleSiteDensity) -> float:
    """S((rho + rho') / 2) - (S(rho) + S(rho')) / 2, in bits."""
    mix = SingleSiteDensity(0.5 * (rho.matrix + rho_prime.matrix))
    return (
        von_neumann_entropy(mix)
        - 0.5 * (von_neumann_entropy(rho) + von_neumann_entropy(rho_prime))
    )


def trace_distance(rho: SingleSiteDensity, rho_prime: SingleSiteDensity) -> float:
    """Half the absolute-eigenvalue sum of rho - rho'."""
    d = rho.matrix - rho_prime.matrix
    mean = 0.5 * d.trace().real
    r = np.hypot(0.5 * (d[0, 0].real - d[1, 1].real), abs(d[0, 1]))
    return 0.5 * (abs(mean + r) + abs(mean - r))


def tomography_reconstruct(p_up: float, amplitude: float, sign: float) -> SingleSiteDensity:
    """Density matrix from measured population and parity-oscillation amplitude.

    rho = (I + (2 p_up - 1) sigma^z) / 2 + sign * amplitude * sigma^y,
    mirroring the experimental pipeline where the off-diagonals come from a
    fitted oscillation amplitude and a sign inferred from the population slope.
    """
    if not 0.0 <= p_up <= 1.0:
        raise InvalidDensity(f"p_up must be a probability, got {p_up}")
    if not 0.0 <= amplitude <= 0.5:
        raise NonPhysicalDensity(f"amplitude must lie in [0, 0.5], got {amplitude}")
    m = 0.5 * (np.eye(2) + (2.0 * p_up - 1.0) * SIGMA_Z) + np.sign(sign) * amplitude * SIGMA_Y
    rho = SingleSiteDensity(m)
    lo, _ = rho.eigenvalues()
    if lo < -_EIG_CLAMP:
        raise NonPhysicalDensity(
            f"(p_up={p_up}, amplitude={amplitude}) implies a negative eigenvalue {lo:.3e}"
        )
    return rho


def otoc_from_population(p_up: float) -> float:
    """ZZ-correlator value 2 * P(up) - 1 for a site initialised in the up state."""
    if not 0.0 <= p_up <= 1.0:
        raise ValueError(f"p_up must be a probability, got {p_up}")
    return 2.0 * p_up - 1.0


def domain_wall_density(psi: StateVector, window: Sequence[int] | None = None) -> float:
    """Mean of <(1 - sigma^z_i sigma^z_{i+1}) / 2> over the bonds inside `window`.

    Equals the probability-weighted fraction of neighbouring pairs whose spins
    differ: 1 for the Neel state, 0 for the all-down state.
    """
    n = psi.basis.n_sites
    sites = list(window) if window is not None else list(range(n))
    if len(sites) < 2:
        raise WindowTooSmall("domain-wall window needs at least two sites")
    bits = psi.basis.bits
    probs = np.abs(psi.amplitudes) ** 2
    walls = np.zeros(psi.basis.dim)
    for a, b in zip(sites[:-1], sites[1:]):
        walls += bits[:, a] != bits[:, b]
    return float(np.sum(probs * walls) / (len(sites) - 1))
