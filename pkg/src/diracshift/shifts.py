"""Stationary-phase lateral shifts of the reflected and transmitted beams.

Sign convention: for a spectral amplitude a(k) the envelope is displaced by
``-d arg a / dk`` (positions grow along +z).  Shifts returned by the public
functions are in units of the Compton wavelength h/(mc), i.e. the internal
hbar/(mc) result multiplied by m / (2 pi).

Three independent routes give the same numbers and are cross-checked in the
test suite:

* closed forms in the plane of incidence (ky = 0),
* vector forms valid for any transverse momentum, together with the
  equivalent Omega-form expressions,
* finite differences of the amplitude phases (:func:`fd_shift_oracle`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dirac_core import KLike, _as_k
from .errors import (
    BranchDiscontinuity,
    EvanescentChannel,
    GrazingIncidence,
    InvalidParameter,
    NormalIncidenceUndefined,
    OutOfAngularRange,
    ZeroAmplitude,
)
from .scattering import BarrierConfig, IncidentBeam, amplitudes_closed_form, critical_angles, transmitted_channel
from .spin import BlochVector, SpinState, _as_tau, chi_from_bloch

__all__ = [
    "PhaseDecomposition",
    "ShiftVector",
    "basis_decompose",
    "weighted_shift",
    "theta_reflected",
    "theta_transmitted",
    "phase_route_shift",
    "shift_reflected_ky0",
    "shift_transmitted_ky0",
    "shift_reflected_vector",
    "shift_transmitted_vector",
    "omega_shift_reflected",
    "omega_shift_transmitted",
    "special_spin_direction",
    "fd_shift_oracle",
    "fd_shift",
    "fd_shift_vector",
]

TWO_PI = 2.0 * math.pi
_ZERO_WEIGHT = 1e-300
_DEFAULT_STEP = 1e-3
# phase differencing is trusted while a branch amplitude moves by at most this fraction over the stencil
_PHASE_OK = 0.25


@dataclass(frozen=True)
class ShiftVector:
    """Lateral displacement (dy, dz) in Compton wavelengths."""

    dy: float
    dz: float

    def __neg__(self) -> "ShiftVector":
        return ShiftVector(-self.dy, -self.dz)

    def as_array(self) -> np.ndarray:
        return np.array([self.dy, self.dz])


@dataclass(frozen=True)
class PhaseDecomposition:
    """Amplitudes and phases of a two-spinor in the basis {chi(tau_b), chi(-tau_b)}.

    ``thetaA`` and ``thetaB`` are the phases of ``aPrime`` and ``bPrime``
    after dividing out the projections of the incident spin onto the basis
    states (when an incident spin is supplied); those factors do not depend
    on the wavevector.
    """

    basis: BlochVector
    aPrime: complex
    bPrime: complex
    thetaA: float
    thetaB: float

    @property
    def weights(self):
        return abs(self.aPrime) ** 2, abs(self.bPrime) ** 2


def _basis_states(tau_b):
    t = _as_tau(tau_b)
    up = chi_from_bloch(t).as_array()
    down = chi_from_bloch(-t).as_array()
    return up, down


def basis_decompose(A: complex, B: complex, tau_b, chi=None) -> PhaseDecomposition:
    """Write (A, B) = A' chi(tau_b) + B' chi(-tau_b).

    Parameters
    ----------
    A, B : complex
        Two-spinor amplitudes.
    tau_b : BlochVector or sequence
        Quantization axis of the basis.
    chi : SpinState, optional
        Incident spin.  Its projections onto the basis states are divided out
        before the phases are taken, so ``thetaA``/``thetaB`` carry only the
        wavevector-dependent part.

    Raises
    ------
    ZeroAmplitude
        If A = B = 0.
    """
    if abs(A) == 0 and abs(B) == 0:
        raise ZeroAmplitude("both amplitudes vanish")
    up, down = _basis_states(tau_b)
    v = np.array([A, B], dtype=complex)
    ap = complex(np.vdot(up, v))
    bp = complex(np.vdot(down, v))
    ra, rb = 1.0, 1.0
    if chi is not None:
        c = chi.as_array() if isinstance(chi, SpinState) else np.asarray(chi, dtype=complex)
        pa, pb = np.vdot(up, c), np.vdot(down, c)
        ra = pa if abs(pa) > 1e-12 else 1.0
        rb = pb if abs(pb) > 1e-12 else 1.0
    tA = float(np.angle(ap / ra)) if ap != 0 else 0.0
    tB = float(np.angle(bp / rb)) if bp != 0 else 0.0
    tb = tau_b if isinstance(tau_b, BlochVector) else BlochVector.normalized(*_as_tau(tau_b))
    return PhaseDecomposition(tb, ap, bp, tA, tB)


def weighted_shift(decomp: PhaseDecomposition, shiftA: float, shiftB: float) -> float:
    """Probability-weighted mean of the per-branch shifts."""
    wa, wb = decomp.weights
    tot = wa + wb
    if tot <= _ZERO_WEIGHT:
        raise ZeroAmplitude("zero total weight")
    return (wa * shiftA + wb * shiftB) / tot


# -- closed forms in the plane of incidence -------------------------------


def _kx_pair(cfg: BarrierConfig, ky: float, kz: float):
    k2 = cfg.k**2
    kx2 = k2 - ky * ky - kz * kz
    if kx2 <= 0:
        raise GrazingIncidence("transverse momentum exceeds |k|")
    ch = transmitted_channel(cfg, ky, kz)
    return math.sqrt(kx2), ch


def theta_reflected(cfg: BarrierConfig, kz: float, branch: str = "a") -> float:
    """Phase of A' (branch ``"a"``) or B' (branch ``"b"``) for ky = 0, y basis.

    With ``X = kx^2 - kz^2 (n-1)^2 - kx'^2 n^2`` and ``Y = 2 kx kz (n-1)``,
    theta_a = atan2(Y, X) and theta_b = atan2(-Y, X).
    """
    kx, ch = _kx_pair(cfg, 0.0, kz)
    if ch.evanescent:
        raise EvanescentChannel("phase formula assumes a propagating channel")
    n = cfg.n
    kxp = ch.kx_prime
    x = kx * kx - kz * kz * (n - 1) ** 2 - kxp * kxp * n * n
    y = 2 * kx * kz * (n - 1)
    if branch == "a":
        return math.atan2(y, x)
    if branch == "b":
        return math.atan2(-y, x)
    raise ValueError(f"unknown branch {branch!r}")


def theta_transmitted(cfg: BarrierConfig, kz: float, branch: str = "c") -> float:
    """Phase of C' (``"c"``) or D' (``"d"``) for ky = 0, y basis.

    theta_c = atan2(kz (n-1), kx + n kx') and theta_d = -theta_c.
    """
    kx, ch = _kx_pair(cfg, 0.0, kz)
    if ch.evanescent:
        raise EvanescentChannel("transmitted phase undefined for an evanescent channel")
    n = cfg.n
    num, den = kz * (n - 1), kx + n * ch.kx_prime
    if branch == "c":
        return math.atan2(num, den)
    if branch == "d":
        return math.atan2(-num, den)
    raise ValueError(f"unknown branch {branch!r}")


def phase_route_shift(cfg: BarrierConfig, phi_in: float, tau, which: str = "r") -> float:
    """z shift for ky = 0 from finite differences of the two branch phases.

    The branch weights are the y-basis probabilities of the actual
    amplitudes; the phases come from :func:`theta_reflected` or
    :func:`theta_transmitted`.  Result in Compton wavelengths.
    """
    _check_range(cfg, phi_in)
    beam = IncidentBeam.from_angle(cfg, phi_in, tau=tau)
    kz0 = beam.k.kz
    if which == "r":
        fn, branches = theta_reflected, ("a", "b")
    else:
        fn, branches = theta_transmitted, ("c", "d")
    pair = _amplitude_pair(beam, 0.0, kz0, which)
    dec = basis_decompose(pair[0], pair[1], (0.0, 1.0, 0.0), beam.chi)
    h = _safe_step(cfg, 0.0, kz0, kz0)
    sa = fd_shift_oracle(lambda k: fn(cfg, k, branches[0]), kz0, mass=cfg.mass, step=h)
    sb = fd_shift_oracle(lambda k: fn(cfg, k, branches[1]), kz0, mass=cfg.mass, step=h)
    return weighted_shift(dec, sa, sb)


def _check_range(cfg: BarrierConfig, phi_in: float) -> None:
    phi1, _ = critical_angles(cfg)
    if not (0.0 <= phi_in < phi1):
        raise OutOfAngularRange(
            f"incident angle {math.degrees(phi_in):.6g} deg outside [0, {math.degrees(phi1):.4f}) deg"
        )


def shift_reflected_ky0(cfg: BarrierConfig, phi_in: float, tau_y: float) -> float:
    """Reflected shift along z for ky = 0, in Compton wavelengths.

    Depends on the energy only through mu = m/E and vanishes at
    phi = arctan(sqrt(mu)).
    """
    _check_range(cfg, phi_in)
    mu = cfg.mu_E
    c, s = math.cos(phi_in), math.sin(phi_in)
    tan2 = (s / c) ** 2
    val = tau_y * math.sqrt((1 - mu) / (1 + mu)) * mu * c * (tan2 - mu) / (s * s + mu * mu * c * c)
    return val / TWO_PI


def shift_transmitted_ky0(cfg: BarrierConfig, phi_in: float, tau_y: float) -> float:
    """Transmitted shift along z for ky = 0, in Compton wavelengths.

    Raises
    ------
    EvanescentChannel
        If the transmitted wave does not propagate.
    """
    _check_range(cfg, phi_in)
    kk = cfg.k
    kx, kz = kk * math.cos(phi_in), kk * math.sin(phi_in)
    ch = transmitted_channel(cfg, 0.0, kz)
    if ch.evanescent or ch.kx_prime == 0.0:
        raise EvanescentChannel("no propagating transmitted wave")
    n, kxp = cfg.n, ch.kx_prime
    p = kx + n * kxp
    num = p + kz * kz * (1.0 / kx + n / kxp)
    val = tau_y * (1 - n) * num / (p * p + kz * kz * (1 - n) ** 2)
    return val * cfg.mass / TWO_PI


# -- general transverse momentum ------------------------------------------


def _propagating_kxp(cfg: BarrierConfig, k: np.ndarray) -> float:
    ch = transmitted_channel(cfg, k[1], k[2])
    if ch.evanescent or ch.kx_prime == 0.0:
        raise EvanescentChannel("no propagating transmitted wave")
    return ch.kx_prime


def _check_kx(k: np.ndarray) -> None:
    if k[0] <= 1e-10 * np.linalg.norm(k):
        raise GrazingIncidence("kx must be positive and not grazing")


def shift_reflected_vector(k: KLike, tau, cfg: BarrierConfig) -> ShiftVector:
    """Reflected (dy, dz) for arbitrary transverse momentum.

    The expression is independent of V0 (the barrier only selects the
    propagating regime).  Its prefactor contains E^2 - kx^2 = m^2 + ky^2 + kz^2,
    which stays positive for m > 0, so normal incidence needs no special case.
    """
    kv = _as_k(k)
    _check_kx(kv)
    _propagating_kxp(cfg, kv)
    t = _as_tau(tau)
    e, m = cfg.energy, cfg.mass
    kx = kv[0]
    ex = np.array([1.0, 0.0, 0.0])
    eta = np.array([0.0, kv[1], kv[2]])
    txk_x = t[1] * kv[2] - t[2] * kv[1]
    pre = 1.0 / (kx * (e + m) ** 2 * (e * e - kx * kx))
    vec = pre * (
        e * (e + m) * txk_x * eta
        + kx * kx * m * (e + m) * np.cross(t, ex)
        + kx * kx * (kv @ t) * np.cross(kv, ex)
    )
    return ShiftVector(float(vec[1]) * m / TWO_PI, float(vec[2]) * m / TWO_PI)


def shift_transmitted_vector(k: KLike, tau, cfg: BarrierConfig) -> ShiftVector:
    """Transmitted (dy, dz) for arbitrary transverse momentum."""
    kv = _as_k(k)
    _check_kx(kv)
    kxp = _propagating_kxp(cfg, kv)
    t = _as_tau(tau)
    n = cfg.n
    kx = kv[0]
    ex = np.array([1.0, 0.0, 0.0])
    eta = np.array([0.0, kv[1], kv[2]])
    k1 = 1.0 / kx + n / kxp
    k2 = kx + n * kxp
    k3 = 1.0 / (k2 * k2 + (n - 1) ** 2 * (kv[1] ** 2 + kv[2] ** 2))
    txk_x = t[1] * kv[2] - t[2] * kv[1]
    vec = -k3 * (n - 1) * (k1 * txk_x * eta - k2 * np.cross(t, ex) + (n - 1) * t[0] * np.cross(ex, kv))
    m = cfg.mass
    return ShiftVector(float(vec[1]) * m / TWO_PI, float(vec[2]) * m / TWO_PI)


def _omega_combination(t, om, dom):
    """-(phase gradient) of G = (om1 + i om2 ...) written through tau."""
    tx, ty, tz = t
    o1, o2, o3 = om
    d1, d2, d3 = dom
    num = ty * (d1 * o3 - o1 * d3) - tz * (d1 * o2 - o1 * d2) + tx * (d2 * o3 - o2 * d3)
    den = o1 * o1 + o2 * o2 + o3 * o3
    if den == 0:
        raise ZeroAmplitude("Omega vanishes; the Omega form is undefined here")
    return num / den


def omega_shift_reflected(k: KLike, tau, cfg: BarrierConfig) -> ShiftVector:
    """Reflected shift from the Omega_1..3 representation.

    Omega_1 = kx^2 - (ky^2+kz^2)(n-1)^2 - kx'^2 n^2, Omega_2 = 2(n-1) kx ky,
    Omega_3 = 2(n-1) kx kz, differentiated with kx and kx' kept on shell.

    Raises
    ------
    ZeroAmplitude
        At V0 = 0, where Omega vanishes identically and this form is 0/0
        (:func:`shift_reflected_vector` stays finite there).
    """
    if cfg.n == 1.0:
        raise ZeroAmplitude("Omega vanishes without a barrier; use shift_reflected_vector")
    kv = _as_k(k)
    _check_kx(kv)
    kxp = _propagating_kxp(cfg, kv)
    t = _as_tau(tau)
    n = cfg.n
    kx, ky, kz = kv
    om = (kx * kx - (ky * ky + kz * kz) * (n - 1) ** 2 - kxp * kxp * n * n, 2 * (n - 1) * kx * ky, 2 * (n - 1) * kx * kz)
    out = []
    for j, kj in ((1, ky), (2, kz)):
        dkx = -kj / kx
        dkxp = -kj / kxp
        d1 = 2 * kx * dkx - 2 * kj * (n - 1) ** 2 - 2 * kxp * dkxp * n * n
        d2 = 2 * (n - 1) * (dkx * ky + (kx if j == 1 else 0.0))
        d3 = 2 * (n - 1) * (dkx * kz + (kx if j == 2 else 0.0))
        out.append(_omega_combination(t, om, (d1, d2, d3)))
    m = cfg.mass
    return ShiftVector(out[0] * m / TWO_PI, out[1] * m / TWO_PI)


def omega_shift_transmitted(k: KLike, tau, cfg: BarrierConfig) -> ShiftVector:
    """Transmitted shift from Omega_k = (kx + n kx', (n-1) ky, (n-1) kz)."""
    kv = _as_k(k)
    _check_kx(kv)
    kxp = _propagating_kxp(cfg, kv)
    t = _as_tau(tau)
    n = cfg.n
    kx, ky, kz = kv
    om = (kx + n * kxp, (n - 1) * ky, (n - 1) * kz)
    out = []
    for j, kj in ((1, ky), (2, kz)):
        d1 = -kj / kx - n * kj / kxp
        d2 = (n - 1) if j == 1 else 0.0
        d3 = (n - 1) if j == 2 else 0.0
        out.append(_omega_combination(t, om, (d1, d2, d3)))
    m = cfg.mass
    return ShiftVector(out[0] * m / TWO_PI, out[1] * m / TWO_PI)


def special_spin_direction(k: KLike) -> BlochVector:
    """Spin axis that both reflection and transmission preserve.

    tau = (0, kz, -ky) / sqrt(ky^2 + kz^2).

    Raises
    ------
    NormalIncidenceUndefined
        If ky = kz = 0.
    """
    kv = _as_k(k)
    rho = math.hypot(kv[1], kv[2])
    if rho <= 1e-15 * max(np.linalg.norm(kv), 1.0):
        raise NormalIncidenceUndefined("transverse momentum vanishes; special direction undefined")
    return BlochVector.normalized(0.0, kv[2] / rho, -kv[1] / rho)


# -- finite-difference oracle ---------------------------------------------


def _stencil_derivative(f: Callable[[float], float], x0: float, h: float, check: bool = True):
    pts = [x0 - 2 * h, x0 - h, x0 + h, x0 + 2 * h]
    vals = [f(x) for x in pts]
    if check:
        centre = f(x0)
        seq = [vals[0], vals[1], centre, vals[2], vals[3]]
        for a, b in zip(seq, seq[1:]):
            if abs(b - a) > math.pi / 2:
                raise BranchDiscontinuity(f"phase jump of {b - a:.3f} rad near {x0:g}; unwrap the phase first")
    return (-vals[3] + 8 * vals[2] - 8 * vals[1] + vals[0]) / (12 * h)


def _richardson(f, x0: float, h: float, check: bool = True):
    d1 = _stencil_derivative(f, x0, h, check)
    d2 = _stencil_derivative(f, x0, h / 2, check)
    return (16 * d2 - d1) / 15


def fd_shift_oracle(
    phase_fn: Callable[[float], float],
    kz0: float,
    *,
    lambda_c: bool = True,
    mass: float = 1.0,
    step: Optional[float] = None,
) -> float:
    """-d(phase)/dkz by a 4-point central stencil with one Richardson step.

    Parameters
    ----------
    phase_fn : callable
        Continuous phase as a function of the wavevector component.
    kz0 : float
        Evaluation point.
    lambda_c : bool
        Convert to Compton wavelengths (multiply by m / 2 pi).  With
        ``False`` the raw derivative in hbar/(mc) is returned.
    mass : float
        Mass used for the unit conversion.
    step : float, optional
        Outer stencil spacing h (points at +-h, +-2h, then h/2).  Defaults to
        1e-3 max(|kz0|, 1), which balances the sixth-order truncation error
        against rounding.

    Raises
    ------
    BranchDiscontinuity
        If neighbouring stencil values differ by more than pi/2.
    """
    h = step if step is not None else _DEFAULT_STEP * max(abs(kz0), 1.0)
    if not h > 0:
        raise InvalidParameter("finite-difference step must be positive")
    val = -_richardson(phase_fn, kz0, h)
    return val * mass / TWO_PI if lambda_c else val


def _safe_step(cfg: BarrierConfig, ky: float, kz: float, x0: float) -> float:
    """Default step, shrunk to stay well inside the analytic region.

    The amplitudes are non-analytic where the transmitted wave turns
    evanescent and where kx vanishes; the stencil keeps 1/64 of the distance
    to the nearer of the two.
    """
    rho = math.hypot(ky, kz)
    ep = cfg.energy - cfg.barrier
    gaps = [cfg.k - rho]
    disc = ep * ep - cfg.mass**2
    if disc > rho * rho:
        gaps.append(math.sqrt(disc) - rho)
    return min(_DEFAULT_STEP * max(abs(x0), 1.0), min(gaps) / 64.0)


def _amplitude_pair(beam: IncidentBeam, ky: float, kz: float, which: str) -> np.ndarray:
    amps = amplitudes_closed_form(beam.with_k(ky, kz))
    if which == "r":
        return np.array([amps.A, amps.B])
    if amps.channel.evanescent:
        raise EvanescentChannel("transmitted shift needs a propagating channel")
    return np.array([amps.C, amps.D])


def _branch_shifts(beam: IncidentBeam, which: str, tau_b, axis: int) -> float:
    ky0, kz0 = beam.k.ky, beam.k.kz
    up, down = _basis_states(tau_b)

    def amp_at(x):
        ky, kz = (x, kz0) if axis == 1 else (ky0, x)
        return _amplitude_pair(beam, ky, kz, which)

    x0 = ky0 if axis == 1 else kz0
    v0 = amp_at(x0)
    dec = basis_decompose(v0[0], v0[1], tau_b, beam.chi)
    h = _safe_step(beam.config, ky0, kz0, x0)
    shifts = []
    for state, ref in ((up, dec.aPrime), (down, dec.bPrime)):
        if abs(ref) < 1e-14 * np.linalg.norm(v0):
            shifts.append(0.0)
            continue
        cref = np.conj(ref)

        def branch(x, state=state):
            return np.vdot(state, amp_at(x))

        edge = max(abs(branch(x0 - 2 * h) - ref), abs(branch(x0 + 2 * h) - ref))
        val = None
        if edge <= _PHASE_OK * abs(ref):
            try:
                val = fd_shift_oracle(lambda x: float(np.angle(branch(x) * cref)), x0, mass=beam.config.mass, step=h)
            except BranchDiscontinuity:
                val = None
        if val is None:
            # the branch amplitude nearly vanishes on the scale of the stencil,
            # so its phase is ill-conditioned; weight * (-dtheta) = -Im(conj(a) da)
            # is smooth, so differentiate the complex amplitude instead
            da = _richardson(branch, x0, h, check=False)
            val = -float(np.imag(cref * da)) / abs(ref) ** 2 * beam.config.mass / TWO_PI
        shifts.append(val)
    return weighted_shift(dec, shifts[0], shifts[1])


def fd_shift(beam: IncidentBeam, which: str = "r", tau_b=(0.0, 1.0, 0.0)) -> float:
    """Finite-difference z shift in Compton wavelengths.

    Each basis branch phase is differentiated with :func:`fd_shift_oracle`
    and the results are weighted by the branch probabilities.  The answer
    does not depend on the basis ``tau_b``.
    """
    return _branch_shifts(beam, which, tau_b, 2)


def fd_shift_vector(beam: IncidentBeam, which: str = "r", tau_b=(0.0, 1.0, 0.0)) -> ShiftVector:
    """Finite-difference (dy, dz) in Compton wavelengths."""
    return ShiftVector(_branch_shifts(beam, which, tau_b, 1), _branch_shifts(beam, which, tau_b, 2))
