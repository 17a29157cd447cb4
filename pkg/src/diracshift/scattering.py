"""Scattering of a Dirac plane wave at an electrostatic step V(x) = V0 * H(x).

The incident wave travels toward +x in the region x < 0.  Reflected and
transmitted amplitudes are obtained either by solving the 4x4 continuity
system at x = 0 or from the closed-form solution of that system.  Both paths
use the same rescaled unknowns ``(A, B, C/s, D/s)`` with::

    s = sqrt((E - V0)(E - V0 + m)) / sqrt(E (E + m))

so the transmitted spinor stays finite even at E = V0 where s vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .dirac_core import WaveVector, sigma_dot
from .errors import (
    BelowRest,
    EvanescentNoAngle,
    GrazingIncidence,
    InvalidParameter,
    KleinRegime,
    NonRealCurrent,
    OutOfAngularRange,
    SingularMatching,
)
from .spin import SpinState, chi_from_bloch

__all__ = [
    "BarrierConfig",
    "IncidentBeam",
    "Propagating",
    "Evanescent",
    "TransmittedChannel",
    "ScatteringAmplitudes",
    "refractive_index",
    "transmitted_channel",
    "matching_system",
    "matching_solve",
    "amplitudes_closed_form",
    "reflection_amplitudes",
    "current_x",
    "incident_bispinor",
    "reflected_bispinor",
    "transmitted_bispinor",
    "coefficients",
    "critical_angles",
    "angles",
]

_ON_SHELL_TOL = 1e-10
_GRAZING = 1e-10


@dataclass(frozen=True)
class BarrierConfig:
    """Incident energy, step height and mass, all in units of mc^2.

    Raises
    ------
    BelowRest
        If energy <= mass.
    KleinRegime
        If energy - barrier + mass <= 0.
    """

    energy: float
    barrier: float
    mass: float = 1.0

    def __post_init__(self):
        for name in ("energy", "barrier", "mass"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise InvalidParameter(f"{name} must be finite")
            object.__setattr__(self, name, val)
        if self.mass <= 0:
            raise InvalidParameter(f"mass must be positive, got {self.mass}")
        if self.barrier < 0:
            raise InvalidParameter(f"barrier must be nonnegative, got {self.barrier}")
        if self.energy <= self.mass:
            raise BelowRest(f"energy {self.energy} must exceed the rest mass {self.mass}")
        if self.energy - self.barrier + self.mass <= 0:
            raise KleinRegime(
                f"E - V0 + m = {self.energy - self.barrier + self.mass:g} <= 0 (Klein regime excluded)"
            )

    @property
    def n(self) -> float:
        return (self.energy + self.mass) / (self.energy - self.barrier + self.mass)

    @property
    def k(self) -> float:
        """Incident wavenumber |k|."""
        return math.sqrt(self.energy**2 - self.mass**2)

    @property
    def mu_E(self) -> float:
        return self.mass / self.energy

    @property
    def mu_V(self) -> float:
        return self.mass / self.barrier if self.barrier > 0 else math.inf

    @property
    def scale(self) -> complex:
        """Rescaling factor s between (C, D) and the solved unknowns."""
        e, v, m = self.energy, self.barrier, self.mass
        return complex(np.sqrt(complex((e - v) * (e - v + m)))) / math.sqrt(e * (e + m))


def refractive_index(cfg: BarrierConfig) -> float:
    """n = (E + m) / (E - V0 + m)."""
    if cfg.energy - cfg.barrier + cfg.mass <= 0:
        raise KleinRegime("E - V0 + m <= 0")
    return cfg.n


@dataclass(frozen=True)
class Propagating:
    """Transmitted wave with real longitudinal wavenumber kx' > 0."""

    kx_prime: float

    evanescent = False

    @property
    def kxp(self) -> complex:
        return complex(self.kx_prime)


@dataclass(frozen=True)
class Evanescent:
    """Transmitted wave decaying as exp(-q x)."""

    q: float

    evanescent = True

    @property
    def kxp(self) -> complex:
        return 1j * self.q


TransmittedChannel = Union[Propagating, Evanescent]


def transmitted_channel(cfg: BarrierConfig, ky: float, kz: float) -> TransmittedChannel:
    """Classify the transmitted wave from its longitudinal discriminant."""
    if cfg.energy - cfg.barrier + cfg.mass <= 0:
        raise KleinRegime("E - V0 + m <= 0")
    ep = cfg.energy - cfg.barrier
    disc = ep * ep - cfg.mass**2 - ky * ky - kz * kz
    if disc >= 0:
        return Propagating(math.sqrt(disc))
    return Evanescent(math.sqrt(-disc))


@dataclass(frozen=True)
class IncidentBeam:
    """On-shell incident plane wave with kx > 0."""

    config: BarrierConfig
    k: WaveVector
    chi: SpinState

    def __post_init__(self):
        k = self.k if isinstance(self.k, WaveVector) else WaveVector(*self.k)
        object.__setattr__(self, "k", k)
        if not isinstance(self.chi, SpinState):
            object.__setattr__(self, "chi", SpinState.normalized(*self.chi))
        kk = self.config.k
        shell = k.kx**2 + k.ky**2 + k.kz**2 - kk**2
        if abs(shell) > _ON_SHELL_TOL * max(1.0, kk**2):
            raise InvalidParameter(f"wavevector is off shell by {shell:.3e}")
        if k.kx <= _GRAZING * kk:
            if k.kx <= 0:
                raise InvalidParameter("incident wave must travel toward +x (kx > 0)")
            raise GrazingIncidence(f"kx = {k.kx:.3e} below {_GRAZING:g} |k|")

    @classmethod
    def from_angle(cls, config: BarrierConfig, phi_in: float, chi=None, ky: float = 0.0, tau=None) -> "IncidentBeam":
        """Beam with in-plane angle phi_in (radians) from the x axis.

        The in-plane part of k has length sqrt(k^2 - ky^2); ``chi`` or
        ``tau`` sets the spin (default spin up along z).
        """
        if not (-math.pi / 2 < phi_in < math.pi / 2):
            raise OutOfAngularRange(f"incident angle {math.degrees(phi_in):g} deg outside (-90, 90)")
        kk = config.k
        if ky * ky >= kk * kk:
            raise InvalidParameter(f"|ky| = {abs(ky):g} must be below |k| = {kk:g}")
        kpar = math.sqrt(kk * kk - ky * ky)
        if chi is None:
            chi = chi_from_bloch(tau) if tau is not None else SpinState(1.0, 0.0)
        return cls(config, WaveVector(kpar * math.cos(phi_in), ky, kpar * math.sin(phi_in)), chi)

    @property
    def energy(self) -> float:
        return self.config.energy

    @property
    def channel(self) -> TransmittedChannel:
        return transmitted_channel(self.config, self.k.ky, self.k.kz)

    def with_k(self, ky: float, kz: float) -> "IncidentBeam":
        """Same energy and spin, transverse components replaced, kx on shell."""
        kk = self.config.k
        kx2 = kk * kk - ky * ky - kz * kz
        if kx2 <= 0:
            raise GrazingIncidence("transverse momentum exceeds |k|")
        return IncidentBeam(self.config, WaveVector(math.sqrt(kx2), ky, kz), self.chi)


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Reflected (A, B) and transmitted (C, D) amplitudes.

    ``C_hat`` and ``D_hat`` are the solved unknowns C/s and D/s, which stay
    finite when s = 0.
    """

    A: complex
    B: complex
    C: complex
    D: complex
    channel: TransmittedChannel
    C_hat: complex
    D_hat: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D], dtype=complex)


def matching_system(beam: IncidentBeam):
    """Return the continuity matrix M and right-hand side d at x = 0."""
    n = beam.config.n
    kx, ky, kz = beam.k.kx, beam.k.ky, beam.k.kz
    kxp = beam.channel.kxp
    l1, l2 = beam.chi.l1, beam.chi.l2
    M = np.array(
        [
            [n, 0, -1, 0],
            [0, n, 0, -1],
            [kz, -kx - 1j * ky, -kz, -(kxp - 1j * ky)],
            [-kx + 1j * ky, -kz, -(kxp + 1j * ky), kz],
        ],
        dtype=complex,
    )
    d = np.array(
        [
            -n * l1,
            -n * l2,
            -(l1 * kz + l2 * (kx - 1j * ky)),
            -(l1 * (kx + 1j * ky) - l2 * kz),
        ],
        dtype=complex,
    )
    return M, d


def matching_solve(beam: IncidentBeam) -> ScatteringAmplitudes:
    """Amplitudes from a dense LU solve of the continuity system.

    Raises
    ------
    SingularMatching
        If the matrix is numerically rank deficient or the residual of the
        solve exceeds 1e-12 ||d||.
    """
    M, d = matching_system(beam)
    if np.linalg.cond(M) > 1e12:
        raise SingularMatching("continuity matrix is numerically singular")
    try:
        c = np.linalg.solve(M, d)
    except np.linalg.LinAlgError as exc:
        raise SingularMatching(str(exc)) from exc
    res = np.linalg.norm(M @ c - d)
    if res > 1e-12 * max(np.linalg.norm(d), 1.0):
        raise SingularMatching(f"residual {res:.3e} too large")
    s = beam.config.scale
    return ScatteringAmplitudes(c[0], c[1], s * c[2], s * c[3], beam.channel, c[2], c[3])


def _closed_form(cfg: BarrierConfig, kx, ky, kz, kxp, l1, l2):
    """Closed-form (A, B, C_hat, D_hat); works elementwise on arrays."""
    n = cfg.n
    nm1 = n - 1.0
    tr2 = ky * ky + kz * kz
    den = kx * kx + tr2 * nm1 * nm1 + 2 * kx * kxp * n + kxp * kxp * n * n
    if np.all(np.asarray(ky) == 0.0):
        x = kx * kx - kz * kz * nm1 * nm1 - kxp * kxp * n * n
        y = 2 * kx * kz * nm1
        A = (l1 * x + l2 * y) / den
        B = (-l1 * y + l2 * x) / den
        p = kx + kxp * n
        ch = 2 * kx * n * (l1 * p + l2 * kz * nm1) / den
        dh = 2 * kx * n * (-l1 * kz * nm1 + l2 * p) / den
    else:
        br = kx * kx - tr2 * nm1 * nm1 - kxp * kxp * n * n
        A = (l1 * br + 2 * kx * (-1j * ky * l1 + kz * l2) * nm1) / den
        B = (l2 * br - 2 * kx * (kz * l1 - 1j * ky * l2) * nm1) / den
        ch = 2 * kx * n * (kx * l1 + kz * l2 * nm1 - 1j * ky * l1 * nm1 + kxp * l1 * n) / den
        dh = 2 * kx * n * (kx * l2 + 1j * ky * l2 * nm1 - kz * l1 * nm1 + kxp * l2 * n) / den
    return A, B, ch, dh


def amplitudes_closed_form(beam: IncidentBeam) -> ScatteringAmplitudes:
    """Amplitudes from the explicit rational solution (valid for any ky)."""
    cfg = beam.config
    channel = beam.channel
    A, B, ch, dh = _closed_form(
        cfg, beam.k.kx, beam.k.ky, beam.k.kz, channel.kxp, beam.chi.l1, beam.chi.l2
    )
    s = cfg.scale
    return ScatteringAmplitudes(complex(A), complex(B), s * ch, s * dh, channel, complex(ch), complex(dh))


def reflection_amplitudes(cfg: BarrierConfig, chi: SpinState, ky: float, kz) -> tuple:
    """Vectorized reflected amplitudes (A, B) over an array of kz.

    Every kz must give a propagating incident wave; the transmitted channel
    may be evanescent.
    """
    kz = np.asarray(kz, dtype=float)
    kx2 = cfg.k**2 - ky * ky - kz * kz
    if np.any(kx2 <= 0):
        raise GrazingIncidence("transverse momentum exceeds |k|")
    kx = np.sqrt(kx2)
    ep = cfg.energy - cfg.barrier
    disc = ep * ep - cfg.mass**2 - ky * ky - kz * kz
    kxp = np.where(disc >= 0, np.sqrt(np.abs(disc)), 1j * np.sqrt(np.abs(disc)))
    A, B, _, _ = _closed_form(cfg, kx, ky, kz, kxp, chi.l1, chi.l2)
    return A, B


def current_x(state) -> float:
    """x component of the probability current, <psi| alpha_x |psi>.

    Raises
    ------
    NonRealCurrent
        If the imaginary part exceeds 1e-10.
    """
    c = np.asarray(state, dtype=complex).reshape(4)
    val = np.conj(c[0]) * c[3] + np.conj(c[1]) * c[2] + np.conj(c[2]) * c[1] + np.conj(c[3]) * c[0]
    if abs(val.imag) > 1e-10:
        raise NonRealCurrent(f"imaginary current {val.imag:.3e}")
    return float(val.real)


def _spinor(upper_factor, kvec, two, norm):
    two = np.asarray(two, dtype=complex)
    return np.concatenate([upper_factor * two, sigma_dot(kvec) @ two]) * norm


def incident_bispinor(beam: IncidentBeam) -> np.ndarray:
    """Normalized incident bispinor at x = 0."""
    e, m = beam.energy, beam.config.mass
    return _spinor(e + m, beam.k.as_array(), beam.chi.as_array(), 1.0 / math.sqrt(2 * e * (e + m)))


def reflected_bispinor(amps: ScatteringAmplitudes, beam: IncidentBeam) -> np.ndarray:
    """Reflected bispinor at x = 0, momentum (-kx, ky, kz)."""
    e, m = beam.energy, beam.config.mass
    return _spinor(e + m, beam.k.reflected().as_array(), [amps.A, amps.B], 1.0 / math.sqrt(2 * e * (e + m)))


def transmitted_bispinor(amps: ScatteringAmplitudes, beam: IncidentBeam) -> np.ndarray:
    """Transmitted bispinor at x = 0.

    Written with the solved unknowns so it is finite for every channel:
    ``((E' + m) (C_hat, D_hat), sigma.k' (C_hat, D_hat)) / sqrt(2E(E + m))``
    with E' = E - V0 and k' = (kx', ky, kz), kx' imaginary when evanescent.
    """
    e, m = beam.energy, beam.config.mass
    ep = e - beam.config.barrier
    kp = np.array([amps.channel.kxp, beam.k.ky, beam.k.kz], dtype=complex)
    return _spinor(ep + m, kp, [amps.C_hat, amps.D_hat], 1.0 / math.sqrt(2 * e * (e + m)))


def coefficients(amps: ScatteringAmplitudes, beam: IncidentBeam):
    """Reflection and transmission probabilities (R, T).

    For an evanescent channel the result is exactly (1, 0).
    """
    if amps.channel.evanescent:
        return 1.0, 0.0
    e = beam.energy
    ep = e - beam.config.barrier
    R = abs(amps.A) ** 2 + abs(amps.B) ** 2
    T = abs(amps.channel.kx_prime * e) / abs(beam.k.kx * ep) * (abs(amps.C) ** 2 + abs(amps.D) ** 2)
    return float(R), float(T)


def critical_angles(cfg: BarrierConfig):
    """(phi_cr1, phi_cr2) in radians.

    phi_cr1 is the onset of total reflection for ky = 0; phi_cr2 is where the
    reflected shift changes sign.
    """
    if cfg.energy - cfg.barrier + cfg.mass <= 0:
        raise KleinRegime("E - V0 + m <= 0")
    e, v, m = cfg.energy, cfg.barrier, cfg.mass
    ratio = ((e - v) ** 2 - m * m) / (e * e - m * m)
    phi1 = math.asin(math.sqrt(min(max(ratio, 0.0), 1.0)))
    phi2 = math.atan(math.sqrt(m / e))
    return phi1, phi2


def angles(beam: IncidentBeam):
    """(phi_in, phi_r, phi_t) in radians for the xz plane of incidence."""
    ch = beam.channel
    if ch.evanescent:
        raise EvanescentNoAngle("no transmission angle for an evanescent channel")
    phi_in = math.atan2(beam.k.kz, beam.k.kx)
    return phi_in, phi_in, math.atan2(beam.k.kz, ch.kx_prime)
