import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from diracshift import scattering as sc
from diracshift import shifts as sh
from diracshift import spin as sp
from diracshift.checks import nonrelativistic_exponent
from diracshift.errors import BranchDiscontinuity, EvanescentChannel, OutOfAngularRange, ZeroAmplitude
from strategies import propagating_setups, unit_vectors

WORK = sc.BarrierConfig(3.0, 0.25)
TAU_Y = 0.92
RAD = math.radians

# frozen from the mpmath reference in tests/oracle.py (40 digits, independent of the library)
FROZEN_R = {0: -0.1035363763580672, 15: -0.05108906133602315, 60: 0.05916364363318126}
FROZEN_T = {0: -0.001755366954366501, 15: -0.001970476632566644, 30: -0.0028562438252829137, 60: -0.029684447468105637}


# -- basis decomposition ----------------------------------------------------


def test_identity_basis():
    d = sh.basis_decompose(0.3 + 0.1j, -0.2j, (0, 0, 1))
    assert d.aPrime == pytest.approx(0.3 + 0.1j, abs=1e-15)
    assert d.bPrime == pytest.approx(-0.2j, abs=1e-15)


def test_y_basis():
    a, b = 0.3 + 0.1j, -0.2 + 0.05j
    d = sh.basis_decompose(a, b, (0, 1, 0))
    assert d.aPrime == pytest.approx((a - 1j * b) / math.sqrt(2), abs=1e-15)
    assert d.bPrime == pytest.approx((a + 1j * b) / math.sqrt(2), abs=1e-15)


@given(unit_vectors(), st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5))
def test_basis_weights_preserve_norm(tau, a, b):
    if abs(a) + abs(b) < 1e-6:
        return
    d = sh.basis_decompose(a, b, tau)
    assert sum(d.weights) == pytest.approx(abs(a) ** 2 + abs(b) ** 2, rel=1e-12)


def test_zero_amplitude():
    with pytest.raises(ZeroAmplitude):
        sh.basis_decompose(0, 0, (0, 0, 1))


def test_weighted_shift_examples():
    d = sh.basis_decompose(1.0, 0.0, (0, 1, 0))  # equal weights
    assert sh.weighted_shift(d, 0.3, -0.3) == pytest.approx(0.0, abs=1e-16)
    d = sh.basis_decompose(1 / math.sqrt(2), 1j / math.sqrt(2), (0, 1, 0))  # all weight on A'
    assert sh.weighted_shift(d, 0.3, -5.0) == pytest.approx(0.3, abs=1e-15)


# -- ky = 0 closed forms ------------------------------------------------------


@pytest.mark.parametrize("deg,expect", [(60, 0.0592), (0, -0.1035), (15, -0.0511)])
def test_reflected_table_points(deg, expect):
    assert sh.shift_reflected_ky0(WORK, RAD(deg), TAU_Y) == pytest.approx(expect, abs=1e-4)


@pytest.mark.parametrize("deg", sorted(FROZEN_R))
def test_reflected_frozen(deg):
    assert sh.shift_reflected_ky0(WORK, RAD(deg), TAU_Y) == pytest.approx(FROZEN_R[deg], rel=1e-12)


@pytest.mark.parametrize("deg", sorted(FROZEN_T))
def test_transmitted_frozen(deg):
    assert sh.shift_transmitted_ky0(WORK, RAD(deg), TAU_Y) == pytest.approx(FROZEN_T[deg], rel=1e-12)


@pytest.mark.parametrize("deg,which", [(7, "r"), (44, "r"), (21, "t"), (55, "t")])
def test_closed_forms_against_mpmath(deg, which):
    ref = float(oracle.shift_z(3, 0.25, deg, TAU_Y, which))
    fn = sh.shift_reflected_ky0 if which == "r" else sh.shift_transmitted_ky0
    assert fn(WORK, RAD(deg), TAU_Y) == pytest.approx(ref, rel=1e-11)


@given(st.floats(-1, 1), st.floats(1.1, 10))
def test_zero_at_second_critical_angle(tau_y, e):
    cfg = sc.BarrierConfig(e, 0.05 * (e - 1))
    phi2 = sc.critical_angles(cfg)[1]
    assert abs(sh.shift_reflected_ky0(cfg, phi2, tau_y)) < 1e-12


@given(st.floats(0, 1.1))
def test_no_spin_y_no_shift(phi):
    assert sh.shift_reflected_ky0(WORK, phi, 0.0) == 0.0
    assert sh.shift_transmitted_ky0(WORK, phi, 0.0) == 0.0


def test_transmitted_is_negative_and_grows():
    phi1 = sc.critical_angles(WORK)[0]
    phis = np.linspace(0, phi1, 400, endpoint=False)
    vals = np.array([sh.shift_transmitted_ky0(WORK, p, TAU_Y) for p in phis])
    assert np.all(vals < 0)
    assert np.all(np.diff(np.abs(vals)) > 0)
    assert abs(sh.shift_transmitted_ky0(WORK, phi1 * (1 - 1e-9), TAU_Y)) > 100


def test_range_guards():
    with pytest.raises(OutOfAngularRange):
        sh.shift_reflected_ky0(WORK, RAD(65), TAU_Y)
    with pytest.raises(OutOfAngularRange):
        sh.shift_transmitted_ky0(WORK, -0.1, TAU_Y)


def test_nonrelativistic_exponent():
    assert nonrelativistic_exponent() == pytest.approx(0.5, abs=0.02)


# -- finite-difference oracle -------------------------------------------------


def test_fd_oracle_trivial_phases():
    assert sh.fd_shift_oracle(lambda k: 0.7 * k, 1.3, lambda_c=False) == pytest.approx(-0.7, abs=1e-12)
    assert sh.fd_shift_oracle(lambda k: 2.0, 1.3, lambda_c=False) == 0.0
    assert sh.fd_shift_oracle(lambda k: 0.7 * k, 1.3) == pytest.approx(-0.7 / (2 * math.pi), abs=1e-12)


def test_fd_oracle_detects_branch_jump():
    with pytest.raises(BranchDiscontinuity):
        sh.fd_shift_oracle(lambda k: math.pi if k > 1.0 else -math.pi, 1.0)


def test_fd_of_theta_a_gives_unit_spin_shift():
    kz0 = WORK.k * math.sin(RAD(60))
    fd = sh.fd_shift_oracle(lambda k: sh.theta_reflected(WORK, k, "a"), kz0)
    assert fd == pytest.approx(sh.shift_reflected_ky0(WORK, RAD(60), TAU_Y) / TAU_Y, rel=1e-6)


@pytest.mark.parametrize("deg", np.linspace(1, 59, 20).round(6).tolist())
def test_phase_and_amplitude_routes_match_closed_form(deg):
    tau = (0.0, TAU_Y, math.sqrt(1 - TAU_Y**2))
    beam = sc.IncidentBeam.from_angle(WORK, RAD(deg), tau=tau)
    for which, fn in (("r", sh.shift_reflected_ky0), ("t", sh.shift_transmitted_ky0)):
        ana = fn(WORK, RAD(deg), TAU_Y)
        assert sh.phase_route_shift(WORK, RAD(deg), tau, which) == pytest.approx(ana, rel=1e-6)
        assert sh.fd_shift(beam, which) == pytest.approx(ana, rel=1e-6)


@given(propagating_setups(), unit_vectors(), unit_vectors())
@settings(max_examples=30)
def test_fd_shift_is_basis_independent(setup, tau, basis):
    e, v, phi, ky = setup
    if v < 1e-3:
        return
    beam = sc.IncidentBeam.from_angle(sc.BarrierConfig(e, v), phi, tau=tau, ky=ky)
    if beam.k.kx < 0.05 * beam.config.k:
        return
    a = sh.fd_shift_vector(beam, "r", (0, 1, 0)).as_array()
    b = sh.fd_shift_vector(beam, "r", basis).as_array()
    assert np.allclose(a, b, rtol=1e-6, atol=1e-9)


# -- general vector forms ---------------------------------------------------


@given(propagating_setups(), unit_vectors())
@settings(max_examples=12)
def test_vector_forms_match_mpmath(setup, tau):
    e, v, phi, ky = setup
    cfg = sc.BarrierConfig(e, v)
    beam = sc.IncidentBeam.from_angle(cfg, phi, tau=tau, ky=ky)
    if v < 1e-6 or beam.k.kx < 0.05 * cfg.k or beam.channel.kx_prime < 0.05 * cfg.k:
        return
    chi = (beam.chi.l1, beam.chi.l2)
    for which, fn in (("r", sh.shift_reflected_vector), ("t", sh.shift_transmitted_vector)):
        ref = np.array([float(x) for x in oracle.shift_vector(e, v, beam.k.ky, beam.k.kz, chi, which)])
        got = fn(beam.k, tau, cfg).as_array()
        assert np.allclose(got, ref, rtol=1e-9, atol=1e-12)


@given(propagating_setups(), unit_vectors())
def test_vector_forms_flip_with_spin(setup, tau):
    e, v, phi, ky = setup
    cfg = sc.BarrierConfig(e, v)
    k = sc.IncidentBeam.from_angle(cfg, phi, ky=ky).k
    for fn in (sh.shift_reflected_vector, sh.shift_transmitted_vector):
        a = fn(k, tau, cfg).as_array()
        b = fn(k, sp.BlochVector(*tau).__neg__(), cfg).as_array()
        assert np.array_equal(a, -b)


@given(propagating_setups(), unit_vectors())
def test_omega_forms_match_vector_forms(setup, tau):
    e, v, phi, ky = setup
    cfg = sc.BarrierConfig(e, v)
    k = sc.IncidentBeam.from_angle(cfg, phi, ky=ky).k
    # Omega_1 is O(n - 1) but built from O(k^2) terms, so it loses about
    # eps / (n - 1) relative accuracy as the barrier goes to zero
    cond = 1e-15 / max(cfg.n - 1, 1e-300)
    pairs = [(sh.shift_transmitted_vector, sh.omega_shift_transmitted)]
    if cfg.n != 1.0:
        pairs.append((sh.shift_reflected_vector, sh.omega_shift_reflected))
    for vec, om in pairs:
        a, b = vec(k, tau, cfg).as_array(), om(k, tau, cfg).as_array()
        assert np.max(np.abs(a - b)) <= (1e-10 + cond) * max(np.max(np.abs(a)), 1e-3)


def test_omega_form_undefined_without_barrier():
    cfg = sc.BarrierConfig(3.0, 0.0)
    with pytest.raises(ZeroAmplitude):
        sh.omega_shift_reflected(sc.IncidentBeam.from_angle(cfg, 0.3).k, (0, 1, 0), cfg)


@given(st.floats(1.2, 6), st.floats(0.01, 0.9), st.floats(0, 0.95), st.floats(-1, 1))
def test_vector_forms_reduce_in_plane(e, vfrac, phifrac, tau_y):
    cfg = sc.BarrierConfig(e, vfrac * (e - 1))
    phi = phifrac * sc.critical_angles(cfg)[0]
    k = sc.IncidentBeam.from_angle(cfg, phi).k
    tau = (0.0, tau_y, math.sqrt(1 - tau_y**2))
    r = sh.shift_reflected_vector(k, tau, cfg)
    t = sh.shift_transmitted_vector(k, tau, cfg)
    assert r.dz == pytest.approx(sh.shift_reflected_ky0(cfg, phi, tau_y), abs=1e-10)
    assert t.dz == pytest.approx(sh.shift_transmitted_ky0(cfg, phi, tau_y), abs=1e-10)
    ry = sh.shift_reflected_vector(k, (0, 1, 0), cfg)
    assert abs(ry.dy) < 1e-14


def test_normal_incidence_spin_along_field_gives_no_transmitted_shift():
    k = (WORK.k, 0.0, 0.0)
    assert np.array_equal(np.abs(sh.shift_transmitted_vector(k, (1, 0, 0), WORK).as_array()), [0, 0])


def test_reflected_vector_is_regular_at_normal_incidence():
    k = (WORK.k, 0.0, 0.0)
    r = sh.shift_reflected_vector(k, (0, 1, 0), WORK)
    assert r.dz == pytest.approx(sh.shift_reflected_ky0(WORK, 0.0, 1.0), rel=1e-14)


@given(st.floats(1.5, 6), st.floats(0, 0.8), st.floats(-0.3, 0.3), unit_vectors())
def test_reflected_shift_ignores_barrier_height(e, phi, ky, tau):
    ref = None
    for v in np.linspace(0, 0.3 * (e - 1), 4):
        cfg = sc.BarrierConfig(e, v)
        k = sc.IncidentBeam.from_angle(cfg, phi, ky=ky).k
        if cfg.barrier > 0 and sc.transmitted_channel(cfg, k.ky, k.kz).evanescent:
            continue
        val = sh.shift_reflected_vector(k, tau, cfg).as_array()
        ref = val if ref is None else ref
        assert np.allclose(val, ref, atol=1e-12, rtol=0)


def test_vector_rejects_evanescent():
    k = sc.IncidentBeam.from_angle(WORK, RAD(70)).k
    with pytest.raises(EvanescentChannel):
        sh.shift_reflected_vector(k, (0, 1, 0), WORK)


def test_mpmath_reference_precision():
    # the oracle itself is converged: doubling the working precision changes nothing visible
    a = oracle.shift_z(3, 0.25, 60, TAU_Y)
    with mp.workdps(80):
        b = oracle.shift_z(3, 0.25, 60, TAU_Y)
    assert abs(a - b) < mp.mpf(10) ** -30
