"""Hilbert-space construction and indexing for an N-site spin chain.

A configuration is stored as a machine integer whose bit i gives the state of
site i (1 = excited / Rydberg, 0 = ground). The blockade-constrained space
keeps only configurations without adjacent excitations; its dimension follows
the Fibonacci sequence for open chains and the Lucas sequence for rings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InvalidSize, SizeLimitExceeded

MAX_CONSTRAINED_SITES = 30
MAX_UNCONSTRAINED_SITES = 16


class BoundaryCondition(Enum):
    OPEN = "open"
    PERIODIC = "periodic"


def violates_blockade(config: int, n_sites: int, boundary: BoundaryCondition) -> bool:
    """True if `config` has two adjacent excitations (wrapping for periodic chains)."""
    if config & (config >> 1):
        return True
    if boundary is BoundaryCondition.PERIODIC and n_sites >= 1:
        first = config & 1
        last = (config >> (n_sites - 1)) & 1
        if n_sites == 1:
            return bool(first)  # a single site is its own neighbour on a ring
        return bool(first and last)
    return False


@dataclass(frozen=True)
class HilbertBasis:
    """Ordered, immutable set of allowed configurations with O(log dim) lookup."""

    n_sites: int
    boundary: BoundaryCondition
    constrained: bool
    configs: np.ndarray  # int64, ascending
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return int(self.configs.size)

    def index_of(self, config: int) -> Optional[int]:
        """Ordinal of `config`, or None if it is not in the basis."""
        pos = int(np.searchsorted(self.configs, config))
        if pos < self.dim and int(self.configs[pos]) == config:
            return pos
        return None

    def config_of(self, index: int) -> int:
        return int(self.configs[index])

    def compatible_with(self, other: "HilbertBasis") -> bool:
        return (
            self.n_sites == other.n_sites
            and self.boundary == other.boundary
            and self.constrained == other.constrained
        )

    @property
    def bits(self) -> np.ndarray:
        """(dim, n_sites) uint8 matrix; bits[a, i] = occupation of site i in config a."""
        cached = self._caches.get("bits")
        if cached is None:
            shifts = np.arange(self.n_sites, dtype=np.int64)
            cached = ((self.configs[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
            self._caches["bits"] = cached
        return cached

    @property
    def parity(self) -> np.ndarray:
        """(-1)**(number of excitations) per config."""
        cached = self._caches.get("parity")
        if cached is None:
            cached = np.where(self.bits.sum(axis=1) % 2 == 0, 1.0, -1.0)
            self._caches["parity"] = cached
        return cached

    def flip_map(self, site: int) -> np.ndarray:
        """Index of each config with bit `site` flipped; -1 where the flip leaves the basis."""
        key = ("flip", site)
        cached = self._caches.get(key)
        if cached is None:
            flipped = self.configs ^ np.int64(1 << site)
            pos = np.searchsorted(self.configs, flipped)
            pos_clipped = np.minimum(pos, self.dim - 1)
            ok = self.configs[pos_clipped] == flipped
            cached = np.where(ok, pos_clipped, -1).astype(np.int64)
            self._caches[key] = cached
        return cached


def _constrained_configs(n_sites: int, boundary: BoundaryCondition) -> np.ndarray:
    # Extend site by site: a 0 may always be appended, a 1 only after a 0.
    configs = [0, 1]
    for i in range(1, n_sites):
        bit = 1 << i
        prev = 1 << (i - 1)
        configs = configs + [c | bit for c in configs if not c & prev]
    if boundary is BoundaryCondition.PERIODIC:
        if n_sites == 1:
            configs = [0]
        else:
            last = 1 << (n_sites - 1)
            configs = [c for c in configs if not (c & 1 and c & last)]
    return np.array(configs, dtype=np.int64)


def build_basis(
    n_sites: int,
    boundary: BoundaryCondition = BoundaryCondition.OPEN,
    constrained: bool = True,
) -> HilbertBasis:
    """Construct the ordered basis for an `n_sites` chain.

    Constrained bases enumerate blockade-allowed configurations directly
    (no 2**N scan), so chains up to 30 sites stay cheap; unconstrained
    bases are capped at 16 sites.
    """
    if n_sites < 1:
        raise InvalidSize(f"n_sites must be >= 1, got {n_sites}")
    if constrained:
        if n_sites > MAX_CONSTRAINED_SITES:
            raise SizeLimitExceeded(
                f"constrained basis capped at {MAX_CONSTRAINED_SITES} sites, got {n_sites}"
            )
        configs = _constrained_configs(n_sites, boundary)
    else:
        if n_sites > MAX_UNCONSTRAINED_SITES:
            raise SizeLimitExceeded(
                f"unconstrained basis capped at {MAX_UNCONSTRAINED_SITES} sites, got {n_sites}"
            )
        configs = np.arange(1 << n_sites, dtype=np.int64)
    return HilbertBasis(n_sites, boundary, constrained, configs)
