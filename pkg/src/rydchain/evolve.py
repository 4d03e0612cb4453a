"""Time evolution and instantaneous gates.

`evolve` is the production path (Lanczos/Krylov on the sparse operator,
re-orthogonalised, fixed sub-steps); `dense_oracle` is the reference path via
dense eigendecomposition and is used to validate the Krylov results. Gates are
exact amplitude maps: bit-flip permutations for sigma^x, diagonal phases for
sigma^z.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la

from .basis import HilbertBasis
from .errors import BasisMismatch, ConstraintViolation, ConvergenceFailure, SizeLimitExceeded
from .hamiltonian import SparseOperator

DENSE_ORACLE_LIMIT = 4096
NORM_TOL = 1e-10


@dataclass
class StateVector:
    """Unit-norm complex amplitude vector over a basis."""

    basis: HilbertBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dim,):
            raise BasisMismatch("amplitude vector does not match the basis dimension")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes / self.norm)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def populations(self) -> np.ndarray:
        """Per-site excitation probability <n_i>."""
        return (np.abs(self.amplitudes) ** 2) @ self.basis.bits


@dataclass(frozen=True)
class EvolveConfig:
    krylov_dim: int = 30
    step: float = 0.01  # us
    tol: float = 1e-10

    def __post_init__(self):
        if self.krylov_dim < 2 or self.step <= 0 or self.tol <= 0:
            raise ValueError("invalid evolution config")


def _check_bases(psi: StateVector, h: SparseOperator) -> None:
    if psi.basis is not h.basis and not psi.basis.compatible_with(h.basis):
        raise BasisMismatch("state and operator bases differ")


def _lanczos_step(mat, v: np.ndarray, dt: float, m: int, tol: float) -> np.ndarray:
    """One exp(-i dt H) v via an m-dimensional Lanczos space with full reorthogonalisation."""
    norm0 = np.linalg.norm(v)
    if norm0 == 0:
        return v
    vecs = np.empty((m, v.size), dtype=np.complex128)
    vecs[0] = v / norm0
    alphas = np.empty(m)
    betas = np.empty(m)  # betas[j] couples vecs[j-1] and vecs[j]
    k = m
    scale = 0.0
    b = 0.0
    for j in range(m):
        w = mat @ vecs[j]
        alphas[j] = np.real(np.vdot(vecs[j], w))
        # full reorthogonalisation (subsumes the three-term recurrence, keeps
        # long runs stable); a second pass mops up rounding residue
        for _ in range(2):
            w -= vecs[: j + 1].T @ (vecs[: j + 1].conj() @ w)
        scale = max(scale, abs(alphas[j]), b)
        b = float(np.linalg.norm(w))
        if j + 1 < m:
            betas[j + 1] = b
        if b <= 1e-13 * max(1.0, scale):
            k = j + 1
            break
        if j + 1 < m:
            vecs[j + 1] = w / b
    evals, evecs = la.eigh_tridiagonal(alphas[:k], betas[1:k])
    small = evecs @ (np.exp(-1j * dt * evals) * evecs[0, :])
    if k == m and m >= 2:
        # a-posteriori estimate: weight that would spill into the next vector
        err = abs(b * dt * small[-1])
        if err > tol:
            raise ConvergenceFailure(
                f"Krylov residual {err:.2e} above tolerance {tol:.2e}; "
                "increase krylov_dim or decrease step"
            )
    return norm0 * (vecs[:k].T @ small)


def evolve(
    psi: StateVector, h: SparseOperator, t: float, cfg: Optional[EvolveConfig] = None
) -> StateVector:
    """exp(-i H t) psi by Krylov sub-stepping; norm restored to 1 at the end.

    Negative t evolves backwards exactly (reference runs); protocol-level
    time reversal goes through the global-Z sandwich instead.
    """
    cfg = cfg or EvolveConfig()
    _check_bases(psi, h)
    if t == 0.0:
        return psi.normalized()
    n_steps = max(1, int(np.ceil(abs(t) / cfg.step)))
    dt = t / n_steps
    v = psi.amplitudes.copy()
    mat = h.matrix
    for _ in range(n_steps):
        v = _lanczos_step(mat, v, dt, cfg.krylov_dim, cfg.tol)
    v /= np.linalg.norm(v)
    return StateVector(psi.basis, v)


def dense_oracle(psi: StateVector, h: SparseOperator, t: float) -> StateVector:
    """Reference exp(-i H t) psi via dense eigendecomposition (dim <= 4096)."""
    _check_bases(psi, h)
    if h.dim > DENSE_ORACLE_LIMIT:
        raise SizeLimitExceeded(f"dense oracle capped at dim {DENSE_ORACLE_LIMIT}")
    evals, evecs = _eigh_cached(h)
    v = evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi.amplitudes))
    v /= np.linalg.norm(v)
    return StateVector(psi.basis, v)


def _eigh_cached(h: SparseOperator):
    cached = h._caches.get("eigh")
    if cached is None:
        cached = la.eigh(h.dense())
        h._caches["eigh"] = cached
    return cached


class Propagator:
    """Repeated exp(-i H t) applications for one operator.

    Small operators get a cached eigendecomposition (exact, fast for many
    times); larger ones fall back to Krylov stepping.
    """

    def __init__(self, h: SparseOperator, cfg: Optional[EvolveConfig] = None,
                 dense_limit: int = DENSE_ORACLE_LIMIT):
        self.h = h
        self.cfg = cfg or EvolveConfig()
        self.spectral = h.dim <= dense_limit
        if self.spectral:
            self._evals, self._evecs = _eigh_cached(h)

    def apply(self, psi: StateVector, t: float) -> StateVector:
        _check_bases(psi, self.h)
        if t == 0.0:
            return psi.normalized()
        if self.spectral:
            v = self._evecs @ (
                np.exp(-1j * self._evals * t) * (self._evecs.conj().T @ psi.amplitudes)
            )
            v /= np.linalg.norm(v)
            return StateVector(psi.basis, v)
        return evolve(psi, self.h, t, self.cfg)


def apply_local_x(psi: StateVector, site: int) -> StateVector:
    """Flip one site; only legal if no supported configuration leaves the basis."""
    flip = psi.basis.flip_map(site)
    amps = psi.amplitudes
    invalid = flip < 0
    if np.any(invalid) and np.any(np.abs(amps[invalid]) > 1e-12):
        raise ConstraintViolation(
            f"sigma^x on site {site} would create adjacent excitations "
            "for part of the state's support"
        )
    out = np.zeros_like(amps)
    valid = ~invalid
    out[flip[valid]] = amps[valid]
    return StateVector(psi.basis, out)


def apply_local_z(psi: StateVector, site: int, phase: float = np.pi) -> StateVector:
    """Multiply excited-site amplitudes by exp(i*phase); phase=pi is an exact sigma^z."""
    bit = psi.basis.bits[:, site].astype(bool)
    out = psi.amplitudes.copy()
    out[bit] *= np.exp(1j * phase)
    return StateVector(psi.basis, out)


def apply_global_z(psi: StateVector) -> StateVector:
    """Multiply every amplitude by (-1)**(number of excitations)."""
    return StateVector(psi.basis, psi.amplitudes * psi.basis.parity)
