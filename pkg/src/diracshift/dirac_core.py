"""Dirac matrix algebra and free-particle plane-wave eigenstates.

Natural units throughout (hbar = c = 1).  Bispinors are returned as complex
arrays of shape ``(4,)`` and 4x4 operators as complex arrays of shape
``(4, 4)``.  Wavevectors may be given as :class:`WaveVector` or as any
length-3 sequence of reals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np

from .errors import DegenerateDirection, InvalidParameter, ZeroMomentum

__all__ = [
    "WaveVector",
    "PAULI",
    "IDENTITY2",
    "sigma_dot",
    "dirac_matrices",
    "hamiltonian",
    "free_energy",
    "positive_energy_spinor",
    "helicity_spinors",
    "helicity_operator",
    "diagonalizer",
    "commutator_with_H",
]

IDENTITY2 = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# below this |k| the rest-frame limit is used for W'
_REST_EPS = 1e-12


@dataclass(frozen=True)
class WaveVector:
    """Cartesian wavevector in units of mc/hbar."""

    kx: float
    ky: float
    kz: float

    def __post_init__(self):
        if not all(np.isfinite((self.kx, self.ky, self.kz))):
            raise InvalidParameter("wavevector components must be finite")

    @property
    def magnitude(self) -> float:
        return float(np.sqrt(self.kx**2 + self.ky**2 + self.kz**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.kx, self.ky, self.kz], dtype=float)

    def reflected(self) -> "WaveVector":
        return WaveVector(-self.kx, self.ky, self.kz)


KLike = Union[WaveVector, Sequence[float], np.ndarray]


def _as_k(k: KLike) -> np.ndarray:
    if isinstance(k, WaveVector):
        return k.as_array()
    arr = np.asarray(k, dtype=float)
    if arr.shape != (3,):
        raise InvalidParameter(f"wavevector must have 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameter("wavevector components must be finite")
    return arr


def _check_mass(m: float) -> None:
    if not (np.isfinite(m) and m > 0):
        raise InvalidParameter(f"mass must be positive, got {m}")


def sigma_dot(v) -> np.ndarray:
    """Return sigma . v for a (possibly complex) 3-vector ``v``."""
    return v[0] * PAULI[0] + v[1] * PAULI[1] + v[2] * PAULI[2]


def _block(a, b, c, d) -> np.ndarray:
    return np.block([[a, b], [c, d]])


def dirac_matrices():
    """Dirac matrices in the standard representation.

    Returns
    -------
    tuple of ndarray
        ``(alpha_x, alpha_y, alpha_z, beta)``, each 4x4 complex.
    """
    z = np.zeros((2, 2), dtype=complex)
    alphas = tuple(_block(z, s, s, z) for s in PAULI)
    beta = _block(IDENTITY2, z, z, -IDENTITY2)
    return alphas + (beta,)


def hamiltonian(k: KLike, m: float = 1.0) -> np.ndarray:
    """Free Dirac Hamiltonian ``[[m, sigma.k], [sigma.k, -m]]``."""
    _check_mass(m)
    sk = sigma_dot(_as_k(k))
    return _block(m * IDENTITY2, sk, sk, -m * IDENTITY2)


def free_energy(k: KLike, m: float = 1.0) -> float:
    """Positive-branch energy sqrt(k^2 + m^2)."""
    _check_mass(m)
    kv = _as_k(k)
    return float(np.sqrt(kv @ kv + m * m))


def positive_energy_spinor(k: KLike, m: float, chi) -> np.ndarray:
    """Unit positive-energy plane-wave bispinor carrying spin state ``chi``.

    Parameters
    ----------
    k : WaveVector or sequence
        Wavevector.
    m : float
        Mass.
    chi : SpinState or length-2 sequence
        Rest-frame two-spinor; normalized on input.

    Returns
    -------
    ndarray
        ``((E+m) chi, (sigma.k) chi) / sqrt(2E(E+m))``.
    """
    _check_mass(m)
    kv = _as_k(k)
    c = _as_chi(chi)
    e = free_energy(kv, m)
    upper = (e + m) * c
    lower = sigma_dot(kv) @ c
    return np.concatenate([upper, lower]) / np.sqrt(2.0 * e * (e + m))


def _as_chi(chi) -> np.ndarray:
    if hasattr(chi, "as_array"):
        return chi.as_array()
    return np.asarray(chi, dtype=complex).reshape(2)


def helicity_spinors(k: KLike, m: float = 1.0) -> list[np.ndarray]:
    """The four normalized helicity eigenstates for wavevector ``k``.

    Order is (+E, +h), (+E, -h), (-E, +h), (-E, -h).

    Raises
    ------
    ZeroMomentum
        If |k| < 1e-15.
    DegenerateDirection
        If k points along -z (|k + kz| < 1e-12 |k|).
    """
    _check_mass(m)
    kv = _as_k(k)
    kk = float(np.linalg.norm(kv))
    if kk < 1e-15:
        raise ZeroMomentum("helicity spinors need a nonzero momentum")
    if abs(kk + kv[2]) < 1e-12 * kk:
        raise DegenerateDirection("momentum along -z: helicity normalization is singular")
    e = float(np.sqrt(kk * kk + m * m))
    up = np.sqrt(e + m)
    um = np.sqrt(e - m)
    kp = kv[0] + 1j * kv[1]
    km = kv[0] - 1j * kv[1]
    v1 = np.array([kk + kv[2], kp])
    v2 = np.array([-km, kk + kv[2]])
    norm = 1.0 / (2.0 * np.sqrt(e * kk * (kk + kv[2])))
    return [
        norm * np.concatenate([up * v1, (kk / up) * v1]),
        norm * np.concatenate([up * v2, -(kk / up) * v2]),
        norm * np.concatenate([um * v1, -(kk / um) * v1]),
        norm * np.concatenate([um * v2, (kk / um) * v2]),
    ]


def helicity_operator(k: KLike) -> np.ndarray:
    """Sigma . k_hat (helicity in units of hbar/2)."""
    kv = _as_k(k)
    kk = np.linalg.norm(kv)
    if kk < 1e-15:
        raise ZeroMomentum("helicity needs a direction")
    s = sigma_dot(kv / kk)
    z = np.zeros((2, 2), dtype=complex)
    return _block(s, z, z, s)


def diagonalizer(k: KLike, m: float = 1.0, variant: Literal["W", "Wprime"] = "Wprime") -> np.ndarray:
    """Unitary U with U^dagger H U = diag(E, E, -E, -E).

    ``"W"`` has the helicity spinors as columns.  ``"Wprime"`` is the
    spin-basis form; for |k| <= 1e-12 it returns the identity (the
    rest-frame limit is direction dependent and never needed downstream).
    """
    _check_mass(m)
    if variant == "W":
        return np.column_stack(helicity_spinors(k, m))
    if variant != "Wprime":
        raise InvalidParameter(f"unknown diagonalizer variant {variant!r}")
    kv = _as_k(k)
    if np.linalg.norm(kv) <= _REST_EPS:
        return np.eye(4, dtype=complex)
    e = free_energy(kv, m)
    up = np.sqrt(e + m)
    um = np.sqrt(e - m)
    sk = sigma_dot(kv)
    w = _block(up * IDENTITY2, um * IDENTITY2, sk / up, -sk / um)
    return w / np.sqrt(2.0 * e)


def commutator_with_H(block_T, k: KLike, m: float = 1.0) -> float:
    """Frobenius norm of [H, diag(T, (sigma.k^)T(sigma.k^))].

    Any operator of this block shape commutes with the free Hamiltonian, so
    the result should sit at rounding level.
    """
    kv = _as_k(k)
    kk = np.linalg.norm(kv)
    if kk < 1e-15:
        raise ZeroMomentum("commutator check needs a direction")
    t = np.asarray(block_T, dtype=complex).reshape(2, 2)
    s = sigma_dot(kv / kk)
    z = np.zeros((2, 2), dtype=complex)
    o = _block(t, z, z, s @ t @ s)
    h = hamiltonian(kv, m)
    return float(np.linalg.norm(h @ o - o @ h))
