"""Simulator of kinetically constrained Rydberg-chain dynamics.

Core pieces: blockade-constrained Hilbert spaces, PXP / Rydberg / scarred-toy
Hamiltonians, Krylov time evolution with global-Z time reversal, OTOC and
Holevo-information protocols, a quasi-static Monte Carlo noise model with
IZ-based error mitigation, and a batch runner exposed over a CLI and a small
HTTP service.
"""

__version__ = "0.1.0"

from .basis import BoundaryCondition, HilbertBasis, build_basis
from .evolve import EvolveConfig, StateVector, dense_oracle, evolve
from .hamiltonian import (
    ChainGeometry,
    RydbergParams,
    SparseOperator,
    build_pxp,
    build_rydberg,
    build_toy,
    vdw_matrix,
)

__all__ = [
    "__version__",
    "BoundaryCondition",
    "HilbertBasis",
    "build_basis",
    "EvolveConfig",
    "StateVector",
    "dense_oracle",
    "evolve",
    "ChainGeometry",
    "RydbergParams",
    "SparseOperator",
    "build_pxp",
    "build_rydberg",
    "build_toy",
    "vdw_matrix",
]
