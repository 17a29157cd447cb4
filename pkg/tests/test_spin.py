import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracshift import dirac_core as dc
from diracshift import spin as sp
from diracshift.errors import InvalidParameter
from strategies import masses, spinors, unit_vectors, wavevectors


def test_spin_state_must_be_normalized():
    with pytest.raises(InvalidParameter):
        sp.SpinState(1.0, 1.0)
    s = sp.SpinState.normalized(1.0, 1.0)
    assert abs(abs(s.l1) ** 2 + abs(s.l2) ** 2 - 1) < 1e-15


def test_boost_at_rest_is_pure_spatial():
    s = sp.boost_spin((0, 0, 0), 1.0, (0, 1, 0))
    assert s.s0 == 0
    assert np.allclose(s.sv, (0, 0.5, 0))


def test_boost_known_value():
    # rest spin tau/2; k along x with |k| = sqrt(3), E = 2, gamma = 2
    s = sp.boost_spin((math.sqrt(3), 0, 0), 1.0, (1, 0, 0))
    assert s.s0 == pytest.approx(math.sqrt(3) / 2, rel=1e-15)
    assert s.sv[0] == pytest.approx(1.0, rel=1e-15)
    # transverse spin is not boosted
    t = sp.boost_spin((math.sqrt(3), 0, 0), 1.0, (0, 1, 0))
    assert t.s0 == 0 and t.sv[1] == 0.5


@given(wavevectors, masses, unit_vectors())
def test_spin_four_vector_orthogonal_to_momentum(k, m, tau):
    s = sp.boost_spin(k, m, tau)
    assert abs(s.contract(dc.free_energy(k, m), k)) <= 1e-10 * max(1, np.dot(k, k))


@given(wavevectors, unit_vectors())
def test_gamma_eigenvalues(k, tau):
    g = sp.gamma_spin_operator(sp.boost_spin(k, 1.0, tau))
    t = np.array(tau)
    for sign in (1, -1):
        psi = dc.positive_energy_spinor(k, 1.0, sp.chi_from_bloch(sign * t))
        assert np.linalg.norm(g @ psi - 0.5 * sign * psi) < 1e-10


@given(wavevectors, unit_vectors())
def test_commutator_vanishes_on_positive_subspace(k, tau):
    s = sp.boost_spin(k, 1.0, tau)
    assert sp.positive_subspace_commutator(k, 1.0, s, sp.chi_from_bloch(tau)) < 1e-10


@given(spinors(), st.floats(0, 2 * math.pi))
def test_bloch_vector_ignores_global_phase(chi, alpha):
    a = sp.bloch_from_chi(chi).as_array()
    b = sp.bloch_from_chi(chi * np.exp(1j * alpha)).as_array()
    assert np.allclose(a, b, atol=1e-12)
    assert abs(np.linalg.norm(a) - 1) < 1e-12


@given(unit_vectors())
def test_bloch_round_trip(tau):
    back = sp.bloch_from_chi(sp.chi_from_bloch(tau)).as_array()
    assert np.allclose(back, tau, atol=1e-12)


def test_poles_and_known_states():
    assert np.allclose(sp.chi_from_bloch((0, 0, 1)).as_array(), [1, 0])
    assert np.allclose(sp.chi_from_bloch((0, 0, -1)).as_array(), [0, 1])
    chi = sp.chi_from_bloch((0, 1, 0)).as_array()
    assert np.allclose(chi, np.array([1, 1j]) / math.sqrt(2))


def test_from_angles():
    t = sp.BlochVector.from_angles(math.pi / 2, math.pi / 2)
    assert np.allclose(t.as_array(), [0, 1, 0], atol=1e-15)
    assert np.allclose((-t).as_array(), [0, -1, 0], atol=1e-15)
