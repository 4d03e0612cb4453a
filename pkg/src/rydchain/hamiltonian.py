"""Sparse Hamiltonians for the constrained chain, the full Rydberg chain,
and the Dicke-scarred toy chain.

Unit conventions: every frequency is an angular frequency in rad/us, so
exp(-i H t) with t in microseconds is dimensionless. Values quoted in MHz
elsewhere (config files, papers on this hardware) correspond to 2*pi*MHz here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .basis import BoundaryCondition, HilbertBasis, build_basis
from .errors import BasisMismatch, SizeLimitExceeded, ZeroDistance

MAX_TOY_SITES = 14


@dataclass(frozen=True)
class SparseOperator:
    """Hermitian sparse matrix tied to a specific basis."""

    basis: HilbertBasis
    matrix: sp.csr_matrix
    hermitian: bool = True
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def diagonal_part(self) -> "SparseOperator":
        diag = sp.diags(self.matrix.diagonal()).tocsr()
        return SparseOperator(self.basis, diag, hermitian=True)

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.getH()
        return 0.0 if d.nnz == 0 else float(np.abs(d.data).max())


@dataclass(frozen=True)
class ChainGeometry:
    """Positions of the atoms along the (possibly ring-shaped) chain, in um."""

    n_sites: int
    spacing_um: float = 7.0
    position_offsets_um: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.spacing_um <= 0:
            raise ValueError("spacing must be positive")
        offs = self.position_offsets_um
        if offs is not None:
            offs = np.asarray(offs, dtype=float)
            if offs.shape != (self.n_sites,):
                raise ValueError("position_offsets must have one entry per site")
            if np.any(np.abs(offs) >= self.spacing_um / 2):
                raise ValueError("position offsets must stay below spacing/2")
            object.__setattr__(self, "position_offsets_um", offs)

    def positions(self) -> np.ndarray:
        x = np.arange(self.n_sites, dtype=float) * self.spacing_um
        if self.position_offsets_um is not None:
            x = x + self.position_offsets_um
        return x


@dataclass(frozen=True)
class RydbergParams:
    """Drive and interaction parameters (angular frequencies, rad/us).

    Exactly one of `c6` (rad*um^6/us) and `v_nn` (coupling at nominal spacing)
    must be given; they are interconvertible via c6 = v_nn * spacing**6.
    """

    omega: float
    detuning: float = 0.0
    v_nn: Optional[float] = None
    c6: Optional[float] = None
    interaction_cutoff: Optional[int] = None  # max |i-j| in sites; None = all pairs

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if (self.v_nn is None) == (self.c6 is None):
            raise ValueError("specify exactly one of v_nn and c6")

    def c6_for(self, spacing_um: float) -> float:
        c6 = self.c6 if self.c6 is not None else self.v_nn * spacing_um**6
        if c6 <= 0:
            raise ValueError("interaction coefficient must be positive")
        return c6


def vdw_matrix(
    geometry: ChainGeometry,
    params: RydbergParams,
    boundary: BoundaryCondition = BoundaryCondition.OPEN,
) -> np.ndarray:
    """Symmetric pairwise coupling table V_ij = C6 / R_ij^6.

    Distances use the actual (possibly jittered) positions; on a ring the
    shorter arc is taken. Pairs beyond `interaction_cutoff` sites are zeroed.
    """
    n = geometry.n_sites
    x = geometry.positions()
    d = np.abs(x[:, None] - x[None, :])
    site_sep = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    if boundary is BoundaryCondition.PERIODIC:
        circumference = n * geometry.spacing_um
        d = np.minimum(d, circumference - d)
        site_sep = np.minimum(site_sep, n - site_sep)
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] < 1e-9):
        raise ZeroDistance("two atom positions coincide")
    c6 = params.c6_for(geometry.spacing_um)
    v = np.zeros((n, n))
    v[off] = c6 / d[off] ** 6
    if params.interaction_cutoff is not None:
        v[site_sep > params.interaction_cutoff] = 0.0
    return v


def _pxp_flip_pairs(basis: HilbertBasis):
    """All (row, col) pairs connected by a blockade-allowed single flip."""
    n = basis.n_sites
    periodic = basis.boundary is BoundaryCondition.PERIODIC
    rows, cols = [], []
    bits = basis.bits
    for i in range(n):
        neighbours_down = np.ones(basis.dim, dtype=bool)
        for j in ((i - 1), (i + 1)):
            if periodic:
                j %= n
            elif j < 0 or j >= n:
                continue  # open-boundary edge term: one-sided projector
            neighbours_down &= bits[:, j] == 0
        flip = basis.flip_map(i)
        src = np.nonzero(neighbours_down)[0]
        dst = flip[src]
        keep = dst >= 0  # always true on a constrained basis; guards unconstrained use
        rows.append(src[keep])
        cols.append(dst[keep])
    return np.concatenate(rows), np.concatenate(cols)


def build_pxp(basis: HilbertBasis, omega: float) -> SparseOperator:
    """PXP chain: site i flips with amplitude omega/2 iff its neighbours are down.

    Open boundaries keep the one-sided edge terms (sigma^x at the chain ends
    constrained only by the single existing neighbour).
    """
    if not basis.constrained:
        raise BasisMismatch("PXP is defined on the blockade-constrained basis")
    rows, cols = _pxp_flip_pairs(basis)
    vals = np.full(rows.size, omega / 2.0)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim)).tocsr()
    return SparseOperator(basis, mat, hermitian=True)


def build_rydberg(
    basis: HilbertBasis,
    geometry: ChainGeometry,
    params: RydbergParams,
    drive_phase: float = 0.0,
) -> SparseOperator:
    """Rydberg chain H = (omega/2) sum sigma^x_i - detuning sum n_i + sum V_ij n_i n_j.

    On a constrained basis the sigma^x terms that would leave the subspace are
    projected out (blockade-restricted approximation) while every in-basis
    diagonal V_ij is kept. A nonzero `drive_phase` turns the flip amplitude
    into (omega/2) exp(-i phase) on the raising part, Hermitian-completed.
    """
    if geometry.n_sites != basis.n_sites:
        raise BasisMismatch("geometry and basis disagree on the number of sites")
    n = basis.n_sites
    bits = basis.bits.astype(float)
    v = vdw_matrix(geometry, params, basis.boundary)
    diag = 0.5 * np.einsum("ai,ij,aj->a", bits, v, bits) - params.detuning * bits.sum(axis=1)

    rows_list, cols_list, up_list = [], [], []
    if basis.constrained:
        rows, cols = _pxp_flip_pairs(basis)
        excitations = bits.sum(axis=1)
        rows_list.append(rows)
        cols_list.append(cols)
        up_list.append(excitations[cols] > excitations[rows])
    else:
        for i in range(n):
            flip = basis.flip_map(i)
            src = np.arange(basis.dim)
            rows_list.append(src)
            cols_list.append(flip)
            up_list.append(basis.bits[:, i] == 0)
    rows = np.concatenate(rows_list)
    cols = np.concatenate(cols_list)
    raising = np.concatenate(up_list)

    if drive_phase == 0.0:
        vals = np.full(rows.size, params.omega / 2.0)
        mat = sp.coo_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
        mat = (mat + sp.diags(diag)).tocsr()
    else:
        amp = (params.omega / 2.0) * np.exp(-1j * drive_phase)
        vals = np.where(raising, amp, np.conj(amp))
        mat = sp.coo_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
        mat = (mat + sp.diags(diag.astype(complex))).tocsr()
    return SparseOperator(basis, mat, hermitian=True)


def build_toy(
    n_sites: int,
    omega: float,
    j_coupling: float,
    boundary: BoundaryCondition = BoundaryCondition.PERIODIC,
) -> SparseOperator:
    """Scarred toy chain on the full 2^N space.

    H = (omega/2) sum_i sigma^x_i + sum_i V_{i-1,i+2} P_{i,i+1}, where
    P_{a,b} projects sites (a, b) onto their singlet and
    V_{a,b} = J (sigma^x_a sigma^y_b + sigma^y_a sigma^x_b). The interaction
    annihilates every Dicke state, so the fully symmetric sector evolves as a
    free collective rotation.
    """
    if n_sites < 1:
        raise SizeLimitExceeded("n_sites must be >= 1")
    if n_sites > MAX_TOY_SITES:
        raise SizeLimitExceeded(f"toy chain capped at {MAX_TOY_SITES} sites")
    basis = build_basis(n_sites, boundary, constrained=False)
    dim = basis.dim
    c = np.arange(dim, dtype=np.int64)

    rows, cols, vals = [], [], []

    # transverse field
    for i in range(n_sites):
        rows.append(c)
        cols.append(c ^ (1 << i))
        vals.append(np.full(dim, omega / 2.0, dtype=complex))

    # interaction: V on (i-1, i+2) times singlet projector on (i, i+1)
    if boundary is BoundaryCondition.PERIODIC:
        terms = [((i - 1) % n_sites, i, (i + 1) % n_sites, (i + 2) % n_sites) for i in range(n_sites)]
    else:
        terms = [(i - 1, i, i + 1, i + 2) for i in range(1, n_sites - 2)]
    for w, x, y, z in terms:
        if len({w, x, y, z}) != 4:
            continue  # degenerate wrap on very short rings
        bw = (c >> w) & 1
        bx = (c >> x) & 1
        by = (c >> y) & 1
        bz = (c >> z) & 1
        # V_{w,z} flips both w and z with amplitude 2iJ(b_w + b_z - 1)
        amp_v = 2j * j_coupling * (bw + bz - 1).astype(complex)
        base = c ^ (1 << w) ^ (1 << z)
        # singlet projector on (x, y): only the antisymmetric part of {01, 10} survives
        in_10 = (bx == 1) & (by == 0)
        in_01 = (bx == 0) & (by == 1)
        active = (in_10 | in_01) & (amp_v != 0)
        if not np.any(active):
            continue
        sign = np.where(in_10, 1.0, -1.0)
        src = c[active]
        to_10 = (base | (1 << x)) & ~np.int64(1 << y)
        to_01 = (base | (1 << y)) & ~np.int64(1 << x)
        rows.append(src)
        cols.append(to_10[active])
        vals.append(0.5 * sign[active] * amp_v[active])
        rows.append(src)
        cols.append(to_01[active])
        vals.append(-0.5 * sign[active] * amp_v[active])

    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    mat.sum_duplicates()
    if np.abs(mat.data.imag).max(initial=0.0) == 0.0:
        mat = sp.csr_matrix((mat.data.real, mat.indices, mat.indptr), shape=mat.shape)
    return SparseOperator(basis, mat, hermitian=True)


def zero_operator(basis: HilbertBasis) -> SparseOperator:
    return SparseOperator(basis, sp.csr_matrix((basis.dim, basis.dim)), hermitian=True)
