import numpy as np
import pytest
import scipy.linalg as la

from rydchain.basis import BoundaryCondition, build_basis
from rydchain.errors import BasisMismatch, SizeLimitExceeded, ZeroDistance
from rydchain.hamiltonian import (
    ChainGeometry,
    RydbergParams,
    build_pxp,
    build_rydberg,
    build_toy,
    vdw_matrix,
)

from conftest import OMEGA, DETUNING, V_NN, SPACING

OPEN = BoundaryCondition.OPEN
PERIODIC = BoundaryCondition.PERIODIC


def test_pxp_two_sites_open():
    basis = build_basis(2, OPEN)
    h = build_pxp(basis, OMEGA).dense() / (OMEGA / 2)
    # basis order (00, 01, 10); 01 <-> 11 is blockade-forbidden
    expected = np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]], dtype=float)
    np.testing.assert_array_equal(h, expected)
    assert basis.index_of(0b11) is None


def test_pxp_neel_like_row_three_sites():
    basis = build_basis(3, OPEN)
    h = build_pxp(basis, OMEGA).dense()
    row = h[basis.index_of(0b010)]
    coupled = np.nonzero(row)[0]
    assert list(coupled) == [basis.index_of(0b000)]


def test_pxp_rejects_unconstrained_basis():
    with pytest.raises(BasisMismatch):
        build_pxp(build_basis(3, OPEN, constrained=False), OMEGA)


@pytest.mark.parametrize("n,boundary", [(8, OPEN), (12, PERIODIC), (9, PERIODIC)])
def test_particle_hole_conjugation_negates_pxp(n, boundary):
    basis = build_basis(n, boundary)
    h = build_pxp(basis, OMEGA).matrix.tocoo()
    parity = basis.parity
    conjugated = parity[h.row] * h.data * parity[h.col]
    assert np.max(np.abs(conjugated + h.data)) == 0.0


@pytest.mark.parametrize(
    "make",
    [
        lambda: build_pxp(build_basis(9, OPEN), OMEGA),
        lambda: build_rydberg(
            build_basis(6, OPEN, constrained=False),
            ChainGeometry(6, SPACING),
            RydbergParams(omega=OMEGA, detuning=DETUNING, v_nn=V_NN),
        ),
        lambda: build_rydberg(
            build_basis(8, PERIODIC),
            ChainGeometry(8, SPACING),
            RydbergParams(omega=OMEGA, detuning=DETUNING, v_nn=V_NN),
            drive_phase=0.3,
        ),
        lambda: build_toy(6, OMEGA, 2 * np.pi * 2.0),
    ],
)
def test_builders_are_hermitian(make):
    assert make().hermiticity_defect() == 0.0


def test_rydberg_two_atom_doubly_excited_diagonal():
    basis = build_basis(2, OPEN, constrained=False)
    h = build_rydberg(
        basis, ChainGeometry(2, SPACING), RydbergParams(omega=OMEGA, detuning=DETUNING, v_nn=V_NN)
    )
    diag = h.dense().real.diagonal()
    assert diag[basis.index_of(0b11)] == pytest.approx(V_NN - 2 * DETUNING, rel=1e-12)


def test_next_nearest_coupling_ratio_is_64():
    v = vdw_matrix(ChainGeometry(3, SPACING), RydbergParams(omega=OMEGA, v_nn=V_NN))
    assert v[0, 2] / v[0, 1] == pytest.approx(1 / 64, rel=1e-12)
    assert v[0, 1] == pytest.approx(V_NN, rel=1e-12)


def test_zero_drive_is_diagonal():
    basis = build_basis(4, OPEN, constrained=False)
    h = build_rydberg(
        basis, ChainGeometry(4, SPACING), RydbergParams(omega=0.0, detuning=0.0, v_nn=V_NN)
    ).dense()
    assert np.abs(h - np.diag(h.diagonal())).max() == 0.0


def test_vdw_cutoff_keeps_nearest_neighbours_only():
    v = vdw_matrix(
        ChainGeometry(5, SPACING),
        RydbergParams(omega=OMEGA, v_nn=V_NN, interaction_cutoff=1),
    )
    off = np.abs(np.subtract.outer(np.arange(5), np.arange(5)))
    assert np.all(v[off > 1] == 0.0)
    assert np.all(v[off == 1] > 0.0)


def test_vdw_position_jitter_rescales_coupling():
    offsets = np.array([0.0, 0.3, 0.0])
    v = vdw_matrix(
        ChainGeometry(3, SPACING, offsets), RydbergParams(omega=OMEGA, v_nn=V_NN)
    )
    assert v[0, 1] == pytest.approx(V_NN * (SPACING / 7.3) ** 6, rel=1e-12)
    assert v[1, 2] == pytest.approx(V_NN * (SPACING / 6.7) ** 6, rel=1e-12)


def test_vdw_periodic_uses_ring_distance():
    v = vdw_matrix(
        ChainGeometry(6, SPACING), RydbergParams(omega=OMEGA, v_nn=V_NN), PERIODIC
    )
    # sites 0 and 5 are nearest neighbours around the ring
    assert v[0, 5] == pytest.approx(V_NN, rel=1e-12)


def test_vdw_zero_distance_raises():
    # degenerate geometry collapses all atoms onto (numerically) one point
    geometry = ChainGeometry(2, 1e-10)
    with pytest.raises(ZeroDistance):
        vdw_matrix(geometry, RydbergParams(omega=OMEGA, v_nn=V_NN))


def test_rydberg_drive_phase_conjugate_structure():
    basis = build_basis(2, OPEN, constrained=False)
    h = build_rydberg(
        basis,
        ChainGeometry(2, SPACING),
        RydbergParams(omega=OMEGA, detuning=0.0, v_nn=V_NN),
        drive_phase=np.pi,
    ).dense()
    # phase pi flips the sign of every flip amplitude
    assert h[basis.index_of(0b00), basis.index_of(0b01)] == pytest.approx(-OMEGA / 2)
    h0 = build_rydberg(
        basis,
        ChainGeometry(2, SPACING),
        RydbergParams(omega=OMEGA, detuning=0.0, v_nn=V_NN),
    ).dense()
    np.testing.assert_allclose(h, -h0 + 2 * np.diag(h0.diagonal()), atol=1e-12)


# ---------------------------------------------------------------------------
# toy chain


def _dicke_x_states(n):
    """All 2S+1 Dicke states |s=n/2, S^x=m> via Hadamard rotation of the
    symmetric z-basis Dicke states."""
    from itertools import combinations

    dim = 1 << n
    z_states = []
    for k in range(n + 1):
        v = np.zeros(dim)
        for ones in combinations(range(n), k):
            v[sum(1 << i for i in ones)] = 1.0
        z_states.append(v / np.linalg.norm(v))
    had = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    rot = np.array([[1.0]])
    for _ in range(n):
        rot = np.kron(rot, had)
    return [rot @ v for v in z_states]


def test_toy_interaction_annihilates_all_down():
    h = build_toy(6, OMEGA, 2 * np.pi * 2.0)
    field_only = build_toy(6, OMEGA, 0.0)
    interaction = (h.matrix - field_only.matrix).toarray()
    v = np.zeros(64)
    v[0] = 1.0
    assert np.abs(interaction @ v).max() == 0.0


def test_toy_interaction_annihilates_every_dicke_state():
    n = 8
    h = build_toy(n, OMEGA, 2 * np.pi * 2.0)
    interaction = (h.matrix - build_toy(n, OMEGA, 0.0).matrix).toarray()
    for state in _dicke_x_states(n):
        assert np.linalg.norm(interaction @ state) < 1e-10


def test_toy_free_spectrum_at_zero_coupling():
    h = build_toy(4, OMEGA, 0.0, OPEN).dense()
    evals = np.sort(la.eigvalsh(h))
    expected = sorted(OMEGA / 2 * (4 - 2 * k) for k in range(5))
    distinct = sorted(set(np.round(evals, 9)))
    np.testing.assert_allclose(distinct, expected, atol=1e-9)


def test_toy_dicke_overlap_matches_collective_rotation():
    # dense-evolution oracle: the symmetric sector evolves as N independent
    # single-spin rotations, so the return probability is cos(omega t / 2)^(2N)
    n = 8
    om = 2 * np.pi * 1.0
    h = build_toy(n, om, 2 * np.pi * 2.0)
    evals, evecs = la.eigh(h.dense())
    v0 = np.zeros(1 << n, dtype=complex)
    v0[0] = 1.0
    for t in np.linspace(0.0, 2.0, 17):
        vt = evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ v0))
        overlap = abs(np.vdot(v0, vt)) ** 2
        assert overlap == pytest.approx(np.cos(om * t / 2) ** (2 * n), abs=1e-10)


def test_toy_size_guard():
    with pytest.raises(SizeLimitExceeded):
        build_toy(15, OMEGA, 0.0)


# ---------------------------------------------------------------------------
# blockade limit


def test_strong_blockade_reproduces_constrained_dynamics():
    """Full-space oracle: at v_nn/omega = 50, detuning 0, nearest-neighbour
    cutoff, populations from the unconstrained chain track the constrained
    chain within 0.05 over Omega t in [0, 4 pi]."""
    from rydchain.protocols import StateLabel, prepare_state, run_populations

    n = 8
    full = build_basis(n, OPEN, constrained=False)
    constrained = build_basis(n, OPEN, constrained=True)
    drive = RydbergParams(omega=OMEGA, detuning=0.0, v_nn=50 * OMEGA, interaction_cutoff=1)
    h_full = build_rydberg(full, ChainGeometry(n, SPACING), drive)
    h_pxp = build_pxp(constrained, OMEGA)
    times = np.linspace(0.0, 4 * np.pi / OMEGA, 25)
    for label in (StateLabel.Z2, StateLabel.ZERO):
        pops_full = run_populations(prepare_state(label, full), h_full, times)
        pops_pxp = run_populations(prepare_state(label, constrained), h_pxp, times)
        assert np.abs(pops_full.values - pops_pxp.values).max() < 0.05
