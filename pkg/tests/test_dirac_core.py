import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from diracshift import dirac_core as dc
from diracshift.errors import DegenerateDirection, InvalidParameter, ZeroMomentum
from strategies import masses, spinors, wavevectors


def test_clifford_relations():
    ax, ay, az, b = dc.dirac_matrices()
    mats = [ax, ay, az, b]
    for i, p in enumerate(mats):
        for j, q in enumerate(mats):
            expect = 2 * np.eye(4) if i == j else np.zeros((4, 4))
            assert np.array_equal(p @ q + q @ p, expect)


def test_hamiltonian_at_rest_is_beta():
    assert np.array_equal(dc.hamiltonian((0, 0, 0), 2.0), 2.0 * dc.dirac_matrices()[3])


def test_free_energy_known_value():
    assert dc.free_energy((2.0, 0.0, 0.0), 1.0) == pytest.approx(np.sqrt(5.0), rel=1e-15)


@given(wavevectors, masses)
def test_hamiltonian_is_hermitian_with_energy_eigenvalues(k, m):
    h = dc.hamiltonian(k, m)
    assert np.allclose(h, h.conj().T, atol=0)
    e = dc.free_energy(k, m)
    assert np.allclose(np.linalg.eigvalsh(h), [-e, -e, e, e], atol=1e-10 * max(e, 1))


@given(wavevectors, masses, spinors())
def test_positive_energy_spinor(k, m, chi):
    psi = dc.positive_energy_spinor(k, m, chi)
    e = dc.free_energy(k, m)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert np.linalg.norm(dc.hamiltonian(k, m) @ psi - e * psi) < 1e-10 * max(e, 1)


@given(wavevectors, masses)
def test_helicity_spinors_are_eigenstates(k, m):
    kk = np.linalg.norm(k)
    assume(kk > 1e-6 and kk + k[2] > 1e-6 * kk)
    states = dc.helicity_spinors(k, m)
    e = dc.free_energy(k, m)
    h = dc.hamiltonian(k, m)
    hel = dc.helicity_operator(k)
    for psi, (se, sh) in zip(states, [(1, 1), (1, -1), (-1, 1), (-1, -1)]):
        assert np.linalg.norm(h @ psi - se * e * psi) < 1e-10 * max(e, 1)
        assert np.linalg.norm(hel @ psi - sh * psi) < 1e-9
    gram = np.array([[np.vdot(a, b) for b in states] for a in states])
    assert np.allclose(gram, np.eye(4), atol=1e-10)


def test_helicity_guards():
    with pytest.raises(ZeroMomentum):
        dc.helicity_spinors((0, 0, 0))
    with pytest.raises(DegenerateDirection):
        dc.helicity_spinors((0, 0, -2.0))


@pytest.mark.parametrize("variant", ["W", "Wprime"])
@given(k=wavevectors, m=masses)
def test_diagonalizer_unitary_and_diagonalizing(variant, k, m):
    if variant == "W":
        kk = np.linalg.norm(k)
        assume(kk > 1e-6 and kk + k[2] > 1e-6 * kk)
    w = dc.diagonalizer(k, m, variant)
    e = dc.free_energy(k, m)
    assert np.linalg.norm(w.conj().T @ w - np.eye(4)) < 1e-10
    d = w.conj().T @ dc.hamiltonian(k, m) @ w
    assert np.linalg.norm(d - np.diag([e, e, -e, -e])) < 1e-10 * max(e, 1)


def test_diagonalizer_at_rest_is_identity():
    assert np.array_equal(dc.diagonalizer((0, 0, 0), 1.0), np.eye(4))


@given(wavevectors, masses, st.tuples(*[st.floats(-3, 3)] * 8))
def test_block_operator_commutes(k, m, t):
    assume(np.linalg.norm(k) > 1e-6)
    block = np.array(t[:4]).reshape(2, 2) + 1j * np.array(t[4:]).reshape(2, 2)
    scale = np.linalg.norm(dc.hamiltonian(k, m)) * max(np.linalg.norm(block), 1)
    assert dc.commutator_with_H(block, k, m) <= 1e-12 * scale


def test_mass_validation():
    with pytest.raises(InvalidParameter):
        dc.hamiltonian((1, 0, 0), 0.0)


def test_wavevector_helpers():
    w = dc.WaveVector(1.0, 2.0, 2.0)
    assert w.magnitude == 3.0
    assert w.reflected() == dc.WaveVector(-1.0, 2.0, 2.0)
    assert np.array_equal(w.as_array(), [1.0, 2.0, 2.0])
