import numpy as np
import pytest

from rydchain.basis import BoundaryCondition, build_basis
from rydchain.errors import (
    InvalidDensity,
    NonPhysicalDensity,
    WeightSumInvalid,
    WindowTooSmall,
)
from rydchain.evolve import StateVector, dense_oracle
from rydchain.hamiltonian import build_pxp
from rydchain.quantities import (
    SIGMA_X,
    SIGMA_Y,
    SingleSiteDensity,
    domain_wall_density,
    ensemble_density,
    holevo,
    otoc_from_population,
    reduced_density,
    tomography_reconstruct,
    trace_distance,
    von_neumann_entropy,
)
from rydchain.protocols import StateLabel, basis_state, prepare_state

from conftest import OMEGA

OPEN = BoundaryCondition.OPEN
PERIODIC = BoundaryCondition.PERIODIC

DOWN = SingleSiteDensity(np.diag([1.0, 0.0]))
UP = SingleSiteDensity(np.diag([0.0, 1.0]))
MIXED = SingleSiteDensity(np.eye(2) / 2)


def random_density(rng):
    r = rng.normal(size=3)
    r *= rng.uniform(0, 1) / np.linalg.norm(r)
    m = 0.5 * (np.eye(2) + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * np.diag([-1.0, 1.0]))
    return SingleSiteDensity(m)


def test_reduced_density_all_down():
    basis = build_basis(4, OPEN)
    rho = reduced_density(prepare_state(StateLabel.ZERO, basis), 2)
    np.testing.assert_allclose(rho.matrix, np.diag([1.0, 0.0]), atol=1e-15)


def test_reduced_density_pure_superposition():
    basis = build_basis(2, OPEN, constrained=False)
    amps = np.zeros(4, dtype=complex)
    amps[0b00] = 1 / np.sqrt(2)
    amps[0b01] = 1 / np.sqrt(2)  # site 0 excited
    rho = reduced_density(StateVector(basis, amps), 0)
    np.testing.assert_allclose(rho.matrix, 0.5 * (np.eye(2) + SIGMA_X), atol=1e-14)


def test_reduced_density_maximally_entangled():
    basis = build_basis(2, OPEN, constrained=False)
    amps = np.zeros(4, dtype=complex)
    amps[0b10] = 1 / np.sqrt(2)  # down-up
    amps[0b01] = 1 / np.sqrt(2)  # up-down
    rho = reduced_density(StateVector(basis, amps), 0)
    np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-14)


def test_reduced_density_of_product_state_is_pure(rng):
    basis = build_basis(5, OPEN, constrained=False)
    single = rng.normal(size=2) + 1j * rng.normal(size=2)
    single /= np.linalg.norm(single)
    amps = np.array([1.0], dtype=complex)
    for _ in range(5):
        amps = np.kron(single, amps)  # bit k of the index selects site k
    psi = StateVector(basis, amps)
    for site in range(5):
        assert von_neumann_entropy(reduced_density(psi, site)) < 1e-9


def test_ensemble_density_single_member_matches_pure():
    basis = build_basis(4, OPEN)
    psi = prepare_state(StateLabel.Z2, basis)
    rho = ensemble_density([(1.0, psi)], 0)
    np.testing.assert_allclose(rho.matrix, reduced_density(psi, 0).matrix, atol=1e-15)


def test_ensemble_density_equal_mixture_is_maximally_mixed():
    basis = build_basis(1, OPEN, constrained=False)
    rho = ensemble_density(
        [(0.5, basis_state(basis, 0)), (0.5, basis_state(basis, 1))], 0
    )
    np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-15)


def test_ensemble_density_matches_weighted_sum(rng):
    basis = build_basis(5, OPEN)
    members = []
    weights = rng.dirichlet(np.ones(4))
    for w in weights:
        amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
        members.append((w, StateVector(basis, amps / np.linalg.norm(amps))))
    rho = ensemble_density(members, 2)
    manual = sum(w * reduced_density(s, 2).matrix for w, s in members)
    np.testing.assert_allclose(rho.matrix, manual, atol=1e-14)


def test_ensemble_density_weight_validation():
    basis = build_basis(2, OPEN)
    psi = prepare_state(StateLabel.ZERO, basis)
    with pytest.raises(WeightSumInvalid):
        ensemble_density([(0.4, psi), (0.4, psi)], 0)
    with pytest.raises(WeightSumInvalid):
        ensemble_density([(-0.2, psi), (1.2, psi)], 0)


def test_entropy_reference_values():
    assert von_neumann_entropy(DOWN) == 0.0
    assert von_neumann_entropy(MIXED) == pytest.approx(1.0, abs=1e-12)
    rho = SingleSiteDensity(np.diag([0.9, 0.1]))
    expected = -(0.9 * np.log2(0.9) + 0.1 * np.log2(0.1))  # scalar-formula oracle
    assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.4690, abs=5e-5)


def test_entropy_rejects_invalid_density():
    with pytest.raises(InvalidDensity):
        von_neumann_entropy(SingleSiteDensity(np.diag([1.4, -0.4])))


def test_holevo_reference_values():
    assert holevo(MIXED, MIXED) == pytest.approx(0.0, abs=1e-12)
    assert holevo(DOWN, UP) == pytest.approx(1.0, abs=1e-12)
    left = SingleSiteDensity(0.5 * (np.eye(2) - SIGMA_X))
    right = SingleSiteDensity(0.5 * (np.eye(2) + SIGMA_X))
    assert holevo(left, right) == pytest.approx(1.0, abs=1e-12)
    assert holevo(left, right) == holevo(right, left)


def test_trace_distance_reference_values():
    assert trace_distance(UP, UP) == 0.0
    assert trace_distance(DOWN, UP) == pytest.approx(1.0, abs=1e-14)
    a = SingleSiteDensity(np.diag([0.7, 0.3]))
    b = SingleSiteDensity(np.diag([0.3, 0.7]))
    assert trace_distance(a, b) == pytest.approx(0.4, abs=1e-14)


def test_holevo_bounds_on_random_pairs(rng):
    for _ in range(1000):
        a, b = random_density(rng), random_density(rng)
        x = holevo(a, b)
        mix = SingleSiteDensity(0.5 * (a.matrix + b.matrix))
        assert -1e-12 <= x <= 1.0 + 1e-12
        assert x <= von_neumann_entropy(mix) + 1e-12


def test_holevo_vanishes_iff_trace_distance_vanishes(rng):
    for _ in range(500):
        a, b = random_density(rng), random_density(rng)
        x = holevo(a, b)
        d = trace_distance(a, b)
        if d < 1e-8:
            assert x < 1e-8
        if x < 1e-12:
            assert d < 1e-5


def test_tomography_reconstruct_reference_cases():
    rho = tomography_reconstruct(1.0, 0.0, +1)
    np.testing.assert_allclose(rho.matrix, np.diag([0.0, 1.0]), atol=1e-15)
    rho = tomography_reconstruct(0.5, 0.5, +1)
    np.testing.assert_allclose(rho.matrix, 0.5 * (np.eye(2) + SIGMA_Y), atol=1e-15)
    assert von_neumann_entropy(rho) < 1e-9  # pure
    with pytest.raises(NonPhysicalDensity):
        tomography_reconstruct(0.5, 0.6, +1)
    with pytest.raises(NonPhysicalDensity):
        tomography_reconstruct(0.9, 0.4, -1)


def test_tomography_matches_exact_density_when_sigma_x_vanishes():
    # periodic-chain evolution keeps <sigma^x> = 0, so the (P, A, sign)
    # reconstruction reproduces the exact reduced density matrix
    basis = build_basis(10, PERIODIC)
    h = build_pxp(basis, OMEGA)
    psi = prepare_state(StateLabel.Z2, basis)
    for t in (0.3, 0.9):
        evolved = dense_oracle(psi, h, t)
        for site in (0, 3, 5):
            exact = reduced_density(evolved, site)
            assert abs(exact.expectation(SIGMA_X)) < 1e-9
            sy = exact.expectation(SIGMA_Y)
            rebuilt = tomography_reconstruct(exact.p_up, abs(sy) / 2, np.sign(sy) or 1.0)
            np.testing.assert_allclose(rebuilt.matrix, exact.matrix, atol=1e-9)


def test_otoc_from_population():
    assert otoc_from_population(1.0) == 1.0
    assert otoc_from_population(0.5) == 0.0
    assert otoc_from_population(0.0) == -1.0
    with pytest.raises(ValueError):
        otoc_from_population(1.2)


def test_domain_wall_density_reference_values():
    basis = build_basis(6, OPEN)
    assert domain_wall_density(prepare_state(StateLabel.Z2, basis)) == pytest.approx(1.0)
    assert domain_wall_density(prepare_state(StateLabel.ZERO, basis)) == 0.0
    two = build_basis(2, OPEN, constrained=False)
    amps = np.zeros(4, dtype=complex)
    amps[0b00] = amps[0b01] = 1 / np.sqrt(2)
    assert domain_wall_density(StateVector(two, amps)) == pytest.approx(0.5)
    with pytest.raises(WindowTooSmall):
        domain_wall_density(prepare_state(StateLabel.ZERO, basis), window=[2])


def test_domain_wall_density_windowed():
    basis = build_basis(6, OPEN)
    psi = basis_state(basis, 0b000101)  # walls on bonds 0-1, 1-2, 2-3 only
    assert domain_wall_density(psi, window=[0, 1, 2, 3]) == pytest.approx(1.0)
    assert domain_wall_density(psi, window=[3, 4, 5]) == pytest.approx(0.0)
