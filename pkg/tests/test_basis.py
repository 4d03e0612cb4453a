import numpy as np
import pytest

from rydchain.basis import BoundaryCondition, build_basis, violates_blockade
from rydchain.errors import InvalidSize, SizeLimitExceeded

from conftest import brute_force_configs, fibonacci, lucas

OPEN = BoundaryCondition.OPEN
PERIODIC = BoundaryCondition.PERIODIC


def test_three_site_open_enumeration():
    basis = build_basis(3, OPEN, constrained=True)
    assert list(basis.configs) == [0b000, 0b001, 0b010, 0b100, 0b101]
    assert basis.dim == 5


def test_four_site_periodic_matches_cyclic_enumeration():
    basis = build_basis(4, PERIODIC, constrained=True)
    assert basis.dim == 7
    assert list(basis.configs) == brute_force_configs(4, periodic=True)


@pytest.mark.parametrize("n", range(1, 13))
@pytest.mark.parametrize("boundary", [OPEN, PERIODIC])
def test_constrained_configs_match_brute_force(n, boundary):
    basis = build_basis(n, boundary, constrained=True)
    assert list(basis.configs) == brute_force_configs(n, boundary is PERIODIC)


@pytest.mark.parametrize("n", range(1, 21))
def test_open_dimension_follows_fibonacci(n):
    assert build_basis(n, OPEN, constrained=True).dim == fibonacci(n + 2)


@pytest.mark.parametrize("n", range(3, 16))
def test_periodic_dimension_follows_lucas(n):
    assert build_basis(n, PERIODIC, constrained=True).dim == lucas(n)


def test_unconstrained_dimension_and_index():
    basis = build_basis(2, OPEN, constrained=False)
    assert basis.dim == 4
    assert basis.index_of(0b11) == 3


@pytest.mark.parametrize("boundary", [OPEN, PERIODIC])
def test_index_roundtrip(boundary):
    basis = build_basis(9, boundary, constrained=True)
    for idx in range(basis.dim):
        assert basis.index_of(basis.config_of(idx)) == idx


def test_blockade_violating_config_is_absent():
    basis = build_basis(3, OPEN, constrained=True)
    assert basis.index_of(0b011) is None
    assert basis.index_of(0b110) is None


@pytest.mark.parametrize("boundary", [OPEN, PERIODIC])
def test_every_config_respects_blockade(boundary):
    basis = build_basis(11, boundary, constrained=True)
    for c in basis.configs:
        assert not violates_blockade(int(c), 11, boundary)


def test_sorted_ascending():
    basis = build_basis(14, OPEN, constrained=True)
    assert np.all(np.diff(basis.configs) > 0)


def test_size_guards():
    with pytest.raises(InvalidSize):
        build_basis(0, OPEN, constrained=True)
    with pytest.raises(SizeLimitExceeded):
        build_basis(31, OPEN, constrained=True)
    with pytest.raises(SizeLimitExceeded):
        build_basis(17, OPEN, constrained=False)


def test_flip_map_identifies_leavers():
    basis = build_basis(3, OPEN, constrained=True)
    flip = basis.flip_map(1)  # flipping the middle site
    # |000> -> |010> allowed, |101> -> |111> leaves the basis
    assert flip[basis.index_of(0b000)] == basis.index_of(0b010)
    assert flip[basis.index_of(0b101)] == -1
