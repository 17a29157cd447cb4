"""Invariant suite run by ``diracshift verify``.

Every check is deterministic (fixed seeds) and returns the worst observed
deviation together with its tolerance, so the printed report is
byte-identical between runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import dirac_core as dc
from . import scattering as sc
from . import shifts as sh
from . import spin as sp
from . import trajectory as tj
from . import wavepacket as wp

__all__ = ["CheckResult", "CHECKS", "run_checks", "format_report"]

WORK = sc.BarrierConfig(3.0, 0.25, 1.0)
TAU_Y = 0.92


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    note: str = ""


def _random_k(rng, scale=3.0):
    return rng.normal(size=3) * scale


def _random_chi(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return sp.SpinState.normalized(v[0], v[1])


def _random_tau(rng):
    return sp.BlochVector.normalized(*rng.normal(size=3))


def _random_beam(rng, allow_ky=True, propagating=True):
    """Random valid configuration; optionally forced into the propagating regime."""
    while True:
        e = rng.uniform(1.05, 8.0)
        v = rng.uniform(0.0, e + 0.95)
        cfg = sc.BarrierConfig(e, v, 1.0)
        kk = cfg.k
        ky = rng.uniform(-0.6, 0.6) * kk if allow_ky else 0.0
        phi = rng.uniform(-1.45, 1.45)
        try:
            beam = sc.IncidentBeam.from_angle(cfg, phi, _random_chi(rng), ky)
        except Exception:  # noqa: BLE001  grazing draws are simply redrawn
            continue
        if propagating and beam.channel.evanescent:
            continue
        return beam


def _result(name, worst, tol, note=""):
    return CheckResult(name, bool(worst <= tol), float(worst), float(tol), note)


# -- dirac_core -------------------------------------------------------------


def check_anticommutation():
    ax, ay, az, b = dc.dirac_matrices()
    worst = 0.0
    eye = np.eye(4)
    for a in (ax, ay, az):
        worst = max(worst, np.linalg.norm(a @ b + b @ a), np.linalg.norm(a @ a - eye))
    worst = max(worst, np.linalg.norm(b @ b - eye))
    return _result("dirac_core.anticommutation", worst, 1e-15)


def check_eigen_residuals():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        k = _random_k(rng)
        if k[2] < -0.99 * np.linalg.norm(k):
            continue
        h = dc.hamiltonian(k, 1.0)
        e = dc.free_energy(k, 1.0)
        for j, psi in enumerate(dc.helicity_spinors(k, 1.0)):
            sgn = 1.0 if j < 2 else -1.0
            worst = max(worst, np.linalg.norm(h @ psi - sgn * e * psi))
        w = dc.diagonalizer(k, 1.0, "Wprime")
        for j in range(4):
            sgn = 1.0 if j < 2 else -1.0
            worst = max(worst, np.linalg.norm(h @ w[:, j] - sgn * e * w[:, j]))
        psi = dc.positive_energy_spinor(k, 1.0, _random_chi(rng))
        worst = max(worst, np.linalg.norm(h @ psi - e * psi))
    return _result("dirac_core.eigen_residuals", worst, 1e-10)


def check_unitarity():
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(100):
        k = _random_k(rng)
        e = dc.free_energy(k, 1.0)
        g = np.diag([e, e, -e, -e])
        for variant in ("Wprime", "W"):
            w = dc.diagonalizer(k, 1.0, variant)
            worst = max(worst, np.linalg.norm(w.conj().T @ w - np.eye(4)))
            worst = max(worst, np.linalg.norm(w.conj().T @ dc.hamiltonian(k, 1.0) @ w - g) / e)
    return _result("dirac_core.unitarity", worst, 1e-10)


def check_theorem1():
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(100):
        k = _random_k(rng)
        t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = dc.hamiltonian(k, 1.0)
        worst = max(worst, dc.commutator_with_H(t, k, 1.0) / (np.linalg.norm(h) * 2 * np.linalg.norm(t)))
    return _result("dirac_core.theorem1_commutator", worst, 1e-12)


# -- spin -------------------------------------------------------------------


def check_spin_orthogonality():
    rng = np.random.default_rng(201)
    worst = 0.0
    for _ in range(100):
        k = _random_k(rng)
        s = sp.boost_spin(k, 1.0, _random_tau(rng))
        worst = max(worst, abs(s.contract(dc.free_energy(k, 1.0), k)))
    return _result("spin.s_dot_p_zero", worst, 1e-10)


def check_gamma_eigen():
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(100):
        k = _random_k(rng)
        tau = _random_tau(rng)
        g = sp.gamma_spin_operator(sp.boost_spin(k, 1.0, tau))
        for sign, t in ((1.0, tau), (-1.0, -tau)):
            psi = dc.positive_energy_spinor(k, 1.0, sp.chi_from_bloch(t))
            worst = max(worst, np.linalg.norm(g @ psi - 0.5 * sign * psi))
    return _result("spin.gamma_eigenvalues", worst, 1e-10)


def check_subspace_commutator():
    rng = np.random.default_rng(203)
    worst = 0.0
    for _ in range(100):
        k = _random_k(rng)
        tau = _random_tau(rng)
        s = sp.boost_spin(k, 1.0, tau)
        worst = max(worst, sp.positive_subspace_commutator(k, 1.0, s, sp.chi_from_bloch(tau)))
    return _result("spin.positive_subspace_commutator", worst, 1e-10)


def check_bloch():
    rng = np.random.default_rng(204)
    worst = 0.0
    for _ in range(100):
        chi = _random_chi(rng)
        t1 = sp.bloch_from_chi(chi).as_array()
        rot = chi.as_array() * np.exp(1j * rng.uniform(0, 2 * np.pi))
        t2 = sp.bloch_from_chi(rot).as_array()
        back = sp.chi_from_bloch(t1).as_array()
        proj = np.outer(back, back.conj())
        rho = 0.5 * (np.eye(2) + dc.sigma_dot(t1))
        worst = max(worst, np.max(abs(t1 - t2)), np.max(abs(proj - rho)))
        worst = max(worst, abs(np.vdot(back, chi.as_array())) ** 2 - 1.0, 1.0 - abs(np.vdot(back, chi.as_array())) ** 2)
    return _result("spin.bloch_round_trip", worst, 1e-12)


# -- scattering ---------------------------------------------------------------


def check_current_conservation():
    rng = np.random.default_rng(301)
    worst = 0.0
    for _ in range(1000):
        beam = _random_beam(rng)
        amps = sc.amplitudes_closed_form(beam)
        jin = sc.current_x(sc.incident_bispinor(beam))
        jr = sc.current_x(sc.reflected_bispinor(amps, beam))
        jt = sc.current_x(sc.transmitted_bispinor(amps, beam))
        r, t = sc.coefficients(amps, beam)
        worst = max(worst, abs(jin + jr - jt) / jin, abs(r + t - 1.0))
    return _result("scattering.current_conservation", worst, 1e-12)


def check_solve_vs_closed_form():
    rng = np.random.default_rng(302)
    worst = 0.0
    for _ in range(1000):
        beam = _random_beam(rng, propagating=False)
        a = sc.matching_solve(beam).as_array()
        b = sc.amplitudes_closed_form(beam).as_array()
        scale = np.max(np.abs(b))
        worst = max(worst, np.max(np.abs(a - b)) / scale)
    return _result("scattering.solve_vs_closed_form", worst, 1e-12)


def check_special_axis():
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(100):
        beam = _random_beam(rng)
        if math.hypot(beam.k.ky, beam.k.kz) < 1e-3:
            continue
        tau = sh.special_spin_direction(beam.k)
        b = sc.IncidentBeam(beam.config, beam.k, sp.chi_from_bloch(tau))
        amps = sc.amplitudes_closed_form(b)
        t = tau.as_array()
        if abs(amps.A) + abs(amps.B) > 1e-8:
            worst = max(worst, np.max(abs(sp.bloch_from_chi([amps.A, amps.B]).as_array() - t)))
        worst = max(worst, np.max(abs(sp.bloch_from_chi([amps.C, amps.D]).as_array() - t)))
    return _result("scattering.special_axis_preserved", worst, 1e-10)


def check_evanescent_totality():
    rng = np.random.default_rng(304)
    worst = 0.0
    count = 0
    while count < 200:
        beam = _random_beam(rng, propagating=False)
        if not beam.channel.evanescent:
            continue
        count += 1
        amps = sc.matching_solve(beam)
        worst = max(worst, abs(abs(amps.A) ** 2 + abs(amps.B) ** 2 - 1.0))
        worst = max(worst, abs(sc.current_x(sc.transmitted_bispinor(amps, beam))))
        r, t = sc.coefficients(amps, beam)
        worst = max(worst, abs(r - 1.0), abs(t))
    return _result("scattering.evanescent_total_reflection", worst, 1e-12)


def check_channel_boundary():
    worst = 0.0
    for e, v in ((3.0, 0.25), (2.0, 0.5), (5.0, 1.0), (1.5, 0.1)):
        cfg = sc.BarrierConfig(e, v)
        lo, hi = 0.0, math.pi / 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if sc.transmitted_channel(cfg, 0.0, cfg.k * math.sin(mid)).evanescent:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-14:
                break
        worst = max(worst, abs(0.5 * (lo + hi) - sc.critical_angles(cfg)[0]))
    return _result("scattering.channel_boundary", worst, 1e-10)


# -- shifts -------------------------------------------------------------------

TABLE_ANGLES = list(range(0, 59, 2)) + [59, 60, 61, 62, 63, 64]
TABLE_DZ_R = [
    -0.1035, -0.1021, -0.0980, -0.0916, -0.0835, -0.0745, -0.0650, -0.0556, -0.0466,
    -0.0381, -0.0302, -0.0231, -0.0165, -0.0105, -0.0050, 0.0, 0.0046, 0.0089,
    0.0130, 0.0168, 0.0205, 0.0241, 0.0275, 0.0310, 0.0345, 0.0381, 0.0418,
    0.0457, 0.0498, 0.0543, 0.0567, 0.0592, 0.0617, 0.0646, 0.0675, 0.0706,
]


def check_table():
    worst = 0.0
    for deg, ref in zip(TABLE_ANGLES, TABLE_DZ_R):
        worst = max(worst, abs(sh.shift_reflected_ky0(WORK, math.radians(deg), TAU_Y) - ref))
    return _result("shifts.table_dz_r", worst, 1e-4)


def check_antisymmetry():
    rng = np.random.default_rng(401)
    worst = 0.0
    for _ in range(20):
        tau = _random_tau(rng)
        phi = math.radians(rng.uniform(0.0, 60.0))
        scale = abs(tau.ty) + 1e-3
        for which in ("r", "t"):
            a = sh.phase_route_shift(WORK, phi, tau, which)
            b = sh.phase_route_shift(WORK, phi, -tau, which)
            worst = max(worst, abs(a + b) / scale)
        kv = sc.IncidentBeam.from_angle(WORK, phi, ky=rng.uniform(-0.5, 0.5)).k
        for fn in (sh.shift_reflected_vector, sh.shift_transmitted_vector):
            worst = max(worst, np.max(abs(fn(kv, tau, WORK).as_array() + fn(kv, -tau, WORK).as_array())))
    return _result("shifts.spin_flip_antisymmetry", worst, 1e-10)


def check_basis_independence():
    rng = np.random.default_rng(402)
    worst = 0.0
    bases = [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1), (-0.3, 0.5, -0.8)]
    for _ in range(10):
        beam = _random_beam(rng)
        if beam.config.barrier < 1e-3:
            continue
        vals = [sh.fd_shift(beam, "r", b) for b in bases]
        worst = max(worst, (max(vals) - min(vals)) / max(abs(np.mean(vals)), 1e-3))
    return _result("shifts.basis_independence", worst, 1e-6)


def check_v0_independence():
    rng = np.random.default_rng(403)
    worst = 0.0
    for _ in range(50):
        e = rng.uniform(1.5, 6.0)
        tau = _random_tau(rng)
        phi = rng.uniform(0.0, 0.8)
        ky = rng.uniform(-0.3, 0.3)
        ref = None
        for v in np.linspace(0.0, 0.3 * (e - 1.0), 5):
            cfg = sc.BarrierConfig(e, v)
            kv = sc.IncidentBeam.from_angle(cfg, phi, ky=ky).k
            if cfg.barrier > 0 and sc.transmitted_channel(cfg, kv.ky, kv.kz).evanescent:
                continue
            val = sh.shift_reflected_vector(kv, tau, cfg).as_array()
            ref = val if ref is None else ref
            worst = max(worst, np.max(abs(val - ref)))
    return _result("shifts.v0_independence", worst, 1e-12)


def check_zero_crossing():
    worst = 0.0
    for e, v in ((3.0, 0.25), (2.0, 0.1), (6.0, 0.5)):
        cfg = sc.BarrierConfig(e, v)
        phi2 = sc.critical_angles(cfg)[1]
        lo, hi = phi2 - 0.2, phi2 + 0.2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if sh.shift_reflected_ky0(cfg, mid, 1.0) < 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-14:
                break
        worst = max(worst, abs(0.5 * (lo + hi) - phi2))
    return _result("shifts.zero_crossing_at_phi_cr2", worst, 1e-10)


def nonrelativistic_exponent(phi_deg: float = 20.0, tau_y: float = TAU_Y) -> float:
    """Slope of log|dz_r| against log(E - m) for E - m in [1e-6, 1e-3]."""
    eps = np.logspace(-6, -3, 13)
    vals = []
    for x in eps:
        cfg = sc.BarrierConfig(1.0 + x, 0.1 * x)
        vals.append(abs(sh.shift_reflected_ky0(cfg, math.radians(phi_deg), tau_y)))
    return float(np.polyfit(np.log(eps), np.log(vals), 1)[0])


def check_nonrelativistic():
    alpha = nonrelativistic_exponent()
    return _result("shifts.nonrelativistic_exponent", abs(alpha - 0.5), 0.02, f"alpha={alpha:.4f}")


def check_analytic_vs_fd():
    phi1 = math.degrees(sc.critical_angles(WORK)[0])
    tau = sp.BlochVector.normalized(0.0, TAU_Y, math.sqrt(1 - TAU_Y**2))
    worst = 0.0
    for deg in np.linspace(1.0, phi1 - 5.0, 20):
        phi = math.radians(deg)
        beam = sc.IncidentBeam.from_angle(WORK, phi, tau=tau)
        for which, ana in (("r", sh.shift_reflected_ky0(WORK, phi, TAU_Y)), ("t", sh.shift_transmitted_ky0(WORK, phi, TAU_Y))):
            for fd in (sh.phase_route_shift(WORK, phi, tau, which), sh.fd_shift(beam, which)):
                worst = max(worst, abs(fd - ana) / abs(ana))
    return _result("shifts.analytic_vs_fd", worst, 1e-6)


def check_vector_reduction():
    rng = np.random.default_rng(405)
    worst = 0.0
    for _ in range(100):
        e = rng.uniform(1.2, 6.0)
        cfg = sc.BarrierConfig(e, rng.uniform(0.01, 0.9) * (e - 1.0))
        phi = rng.uniform(0.0, 0.95) * sc.critical_angles(cfg)[0]
        tau = _random_tau(rng)
        kv = sc.IncidentBeam.from_angle(cfg, phi).k
        r = sh.shift_reflected_vector(kv, tau, cfg)
        t = sh.shift_transmitted_vector(kv, tau, cfg)
        # in-plane spin components still shift along y, so only dz reduces
        worst = max(
            worst,
            abs(r.dz - sh.shift_reflected_ky0(cfg, phi, tau.ty)),
            abs(t.dz - sh.shift_transmitted_ky0(cfg, phi, tau.ty)),
        )
        ry = sh.shift_reflected_vector(kv, (0.0, 1.0, 0.0), cfg)
        ty = sh.shift_transmitted_vector(kv, (0.0, 1.0, 0.0), cfg)
        worst = max(worst, abs(ry.dy), abs(ty.dy))
    return _result("shifts.vector_reduces_to_ky0", worst, 1e-10)


def check_omega_forms():
    rng = np.random.default_rng(406)
    worst = 0.0
    for _ in range(100):
        beam = _random_beam(rng)
        tau = _random_tau(rng)
        cfg = beam.config
        for vec, om in (
            (sh.shift_reflected_vector, sh.omega_shift_reflected),
            (sh.shift_transmitted_vector, sh.omega_shift_transmitted),
        ):
            a = vec(beam.k, tau, cfg).as_array()
            b = om(beam.k, tau, cfg).as_array()
            worst = max(worst, np.max(abs(a - b)) / max(np.max(abs(a)), 1e-12))
    return _result("shifts.omega_forms_match_vector", worst, 1e-10)


def check_transmitted_sign():
    phi1 = sc.critical_angles(WORK)[0]
    worst = -math.inf
    for phi in np.linspace(0.0, phi1, 200, endpoint=False):
        worst = max(worst, sh.shift_transmitted_ky0(WORK, float(phi), TAU_Y))
    return CheckResult("shifts.transmitted_sign_negative", bool(worst < 0), worst, 0.0)


# -- wavepacket ---------------------------------------------------------------


def wavepacket_ladder(kza=(50, 100, 200, 400), phi_deg=60.0, grid=None):
    """Relative errors of the synthesized shift for a ladder of kz0 * a."""
    phi = math.radians(phi_deg)
    beam = sc.IncidentBeam.from_angle(WORK, phi, tau=(0.0, 1.0, 0.0))
    ana = sh.shift_reflected_ky0(WORK, phi, 1.0)
    out = []
    for x in kza:
        res = wp.measure_reflected_shift(beam, x / beam.k.kz, grid)
        out.append(abs(res.shift / ana - 1.0))
    return out


def check_wavepacket():
    errs = wavepacket_ladder()
    monotone = all(b < a for a, b in zip(errs, errs[1:]))
    ok = monotone and errs[2] <= 0.05
    return CheckResult("wavepacket.convergence", ok, errs[2], 0.05, "monotone" if monotone else "not monotone")


def check_wavepacket_norm():
    worst = 0.0
    for deg in (15.0, 30.0):
        beam = sc.IncidentBeam.from_angle(WORK, math.radians(deg), tau=(0.0, 1.0, 0.0))
        r, _ = sc.coefficients(sc.matching_solve(beam), beam)
        for x in (200, 400):
            a = x / beam.k.kz
            ratio = wp.reflected_profile(beam, a).mass / wp.incident_profile(beam, a).mass
            worst = max(worst, abs(ratio / r - 1.0))
    return _result("wavepacket.norm_matches_R", worst, 0.02)


# -- trajectory ---------------------------------------------------------------


def check_trajectory():
    worst = 0.0
    for e0 in (1.5, 3.0, 10.0):
        field = tj.FieldConfig(1.0, -1, e0)
        got = tj.propagate(field, e0, 4000, (0.0, 1.0, 0.0))
        ref = tj.closed_form_trajectory(e0, 2 * e0)
        worst = max(worst, abs(abs(got.dz) / ref - 1.0))
    return _result("trajectory.closed_form_match", worst, 0.01)


def check_trajectory_limit():
    field = tj.FieldConfig(1.0, -1, 3.0)
    got = abs(tj.propagate(field, 997.0, 4000, (0.0, 1.0, 0.0)).dz)
    target = (1.0 - 1.0 / math.sqrt(2.0)) / (4.0 * math.pi)
    return _result("trajectory.limit_0233", abs(got / target - 1.0), 0.01)


def check_trajectory_antisymmetry():
    rng = np.random.default_rng(601)
    worst = 0.0
    field = tj.FieldConfig(0.7, -1, 2.0)
    for _ in range(5):
        tau = _random_tau(rng)
        a = tj.propagate(field, 5.0, 1000, tau).as_array()
        b = tj.propagate(field, 5.0, 1000, -tau).as_array()
        worst = max(worst, np.max(abs(a + b)))
        kv = rng.normal(size=3)
        kv[0] = abs(kv[0]) + 1.0
        e = math.sqrt(kv @ kv + 1.0)
        i1 = tj.local_shift_increment(kv, tau, e, field, 0.01).as_array()
        i2 = tj.local_shift_increment(kv, -tau, e, field, 0.01).as_array()
        worst = max(worst, np.max(abs(i1 + i2)))
    return _result("trajectory.spin_flip_antisymmetry", worst, 0.0)


def check_energy_bookkeeping():
    worst = 0.0
    for e0, f, x in ((3.0, 1.0, 997.0), (1.5, 0.25, 12.0), (10.0, 2.0, 10.0)):
        field = tj.FieldConfig(f, -1, e0)
        worst = max(worst, abs(tj.energy_at(field, x) - (e0 + f * x)))
    return _result("trajectory.energy_bookkeeping", worst, 0.0)


CHECKS: List[Callable[[], CheckResult]] = [
    check_anticommutation,
    check_eigen_residuals,
    check_unitarity,
    check_theorem1,
    check_spin_orthogonality,
    check_gamma_eigen,
    check_subspace_commutator,
    check_bloch,
    check_current_conservation,
    check_solve_vs_closed_form,
    check_special_axis,
    check_evanescent_totality,
    check_channel_boundary,
    check_table,
    check_antisymmetry,
    check_basis_independence,
    check_v0_independence,
    check_zero_crossing,
    check_nonrelativistic,
    check_analytic_vs_fd,
    check_vector_reduction,
    check_omega_forms,
    check_transmitted_sign,
    check_wavepacket,
    check_wavepacket_norm,
    check_trajectory,
    check_trajectory_limit,
    check_trajectory_antisymmetry,
    check_energy_bookkeeping,
]


def run_checks(checks=None) -> List[CheckResult]:
    """Run the suite; an exception inside a check counts as a failure."""
    out = []
    for fn in checks or CHECKS:
        try:
            out.append(fn())
        except Exception as exc:  # noqa: BLE001
            name = fn.__name__.replace("check_", "")
            out.append(CheckResult(name, False, math.nan, math.nan, f"error: {type(exc).__name__}"))
    return out


def format_report(results: List[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  status  worst       tol"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{r.name:<{width}}  {status:<6}  {r.worst:<10.3e}  {r.tol:.1e}"
        if r.note:
            line += f"  {r.note}"
        lines.append(line)
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
