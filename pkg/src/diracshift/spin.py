"""Rest-frame spin states, Bloch vectors and the boosted spin operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac_core import IDENTITY2, KLike, _as_k, _check_mass, hamiltonian, positive_energy_spinor, sigma_dot
from .errors import InvalidParameter

__all__ = [
    "SpinState",
    "BlochVector",
    "SpinFourVector",
    "boost_spin",
    "gamma_spin_operator",
    "commutator_residual",
    "positive_subspace_commutator",
    "bloch_from_chi",
    "chi_from_bloch",
]

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class SpinState:
    """Normalized two-component spin state chi = (l1, l2)."""

    l1: complex
    l2: complex

    def __post_init__(self):
        object.__setattr__(self, "l1", complex(self.l1))
        object.__setattr__(self, "l2", complex(self.l2))
        nrm = abs(self.l1) ** 2 + abs(self.l2) ** 2
        if not np.isfinite(nrm) or abs(nrm - 1.0) > _NORM_TOL:
            raise InvalidParameter(f"spin state must be normalized, |chi|^2 = {nrm}")

    @classmethod
    def normalized(cls, l1: complex, l2: complex) -> "SpinState":
        """Build from an unnormalized pair."""
        nrm = np.sqrt(abs(l1) ** 2 + abs(l2) ** 2)
        if nrm == 0 or not np.isfinite(nrm):
            raise InvalidParameter("spin state cannot be zero")
        return cls(l1 / nrm, l2 / nrm)

    def as_array(self) -> np.ndarray:
        return np.array([self.l1, self.l2], dtype=complex)


@dataclass(frozen=True)
class BlochVector:
    """Unit Bloch vector tau."""

    tx: float
    ty: float
    tz: float

    def __post_init__(self):
        for name in ("tx", "ty", "tz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        nrm = self.tx**2 + self.ty**2 + self.tz**2
        if not np.isfinite(nrm) or abs(nrm - 1.0) > _NORM_TOL:
            raise InvalidParameter(f"Bloch vector must have unit length, |tau|^2 = {nrm}")

    @classmethod
    def normalized(cls, tx: float, ty: float, tz: float) -> "BlochVector":
        v = np.array([tx, ty, tz], dtype=float)
        nrm = np.linalg.norm(v)
        if nrm == 0 or not np.isfinite(nrm):
            raise InvalidParameter("Bloch vector cannot be zero")
        v = v / nrm
        return cls(*v)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochVector":
        """tau = (sin t cos p, sin t sin p, cos t), angles in radians."""
        return cls.normalized(np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.tx, self.ty, self.tz], dtype=float)

    def __neg__(self) -> "BlochVector":
        return BlochVector(-self.tx, -self.ty, -self.tz)


@dataclass(frozen=True)
class SpinFourVector:
    """Spin four-vector (s0, s) in units where the rest spin has length 1/2."""

    s0: float
    sv: tuple

    def as_array(self) -> np.ndarray:
        return np.array(self.sv, dtype=float)

    def contract(self, energy: float, k: KLike) -> float:
        """Minkowski product s0*E - s.k."""
        return float(self.s0 * energy - self.as_array() @ _as_k(k))


def _as_tau(tau) -> np.ndarray:
    if isinstance(tau, BlochVector):
        return tau.as_array()
    return np.asarray(tau, dtype=float).reshape(3)


def boost_spin(k: KLike, m: float, tau) -> SpinFourVector:
    """Boost the rest spin tau/2 to the frame where the particle has momentum k."""
    _check_mass(m)
    kv = _as_k(k)
    st = 0.5 * _as_tau(tau)
    kk = float(np.linalg.norm(kv))
    if kk == 0.0:
        return SpinFourVector(0.0, tuple(st))
    e = float(np.sqrt(kk * kk + m * m))
    gamma = e / m
    khat = kv / kk
    proj = float(khat @ st)
    # gamma * beta = |k| / m
    s0 = (kk / m) * proj
    sv = (gamma - 1.0) * proj * khat + st
    return SpinFourVector(s0, tuple(sv))


def gamma_spin_operator(s: SpinFourVector) -> np.ndarray:
    """Gamma = [[sigma.s, -s0], [s0, -sigma.s]]."""
    ss = sigma_dot(s.as_array())
    i2 = s.s0 * IDENTITY2
    return np.block([[ss, -i2], [i2, -ss]])


def commutator_residual(k: KLike, m: float, s: SpinFourVector, psi) -> float:
    """||[Gamma, H] psi|| for an arbitrary bispinor."""
    g = gamma_spin_operator(s)
    h = hamiltonian(k, m)
    return float(np.linalg.norm((g @ h - h @ g) @ np.asarray(psi, dtype=complex)))


def positive_subspace_commutator(k: KLike, m: float, s: SpinFourVector, chi) -> float:
    """||[Gamma, H] Psi'|| with Psi' the positive-energy spinor carrying chi."""
    return commutator_residual(k, m, s, positive_energy_spinor(k, m, chi))


def bloch_from_chi(chi) -> BlochVector:
    """Bloch vector of a pure spin state (global phase drops out)."""
    c = chi.as_array() if isinstance(chi, SpinState) else np.asarray(chi, dtype=complex).reshape(2)
    nrm = float(np.vdot(c, c).real)
    if nrm == 0.0:
        raise InvalidParameter("spin state cannot be zero")
    cross = np.conj(c[0]) * c[1]
    tau = np.array([2 * cross.real, 2 * cross.imag, abs(c[0]) ** 2 - abs(c[1]) ** 2]) / nrm
    return BlochVector.normalized(*tau)


def chi_from_bloch(tau) -> SpinState:
    """Spin state with Bloch vector tau, l1 real and nonnegative.

    At the south pole the azimuth is set to zero, giving chi = (0, 1).
    """
    t = _as_tau(tau)
    t = t / np.linalg.norm(t)
    rho = float(np.hypot(t[0], t[1]))
    phi = float(np.arctan2(t[1], t[0])) if rho > 1e-15 else 0.0
    # half-angle forms that stay accurate near either pole
    if t[2] >= 0.0:
        l1 = np.sqrt(0.5 * (1.0 + t[2]))
        l2 = complex(t[0], t[1]) / (2.0 * l1)
    else:
        a2 = np.sqrt(0.5 * (1.0 - t[2]))
        l1 = rho / (2.0 * a2)
        l2 = a2 * np.exp(1j * phi)
    return SpinState.normalized(l1, l2)
