"""Spin shift accumulated by a transmitted beam in a uniform electric field.

The field region is cut into thin slabs.  Each slab acts as a small potential
step, so the transmitted beam picks up a lateral increment, and the kinetic
energy grows linearly along +x (the electron is accelerated).  Increments are
evaluated at the slab centre energy (midpoint rule).

Signs: the raw increments are returned as computed (for tau along +y the z
shift is negative with the electron charge).  The closed-form trajectory
integral is the magnitude of the shift for a spin perpendicular to the field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dirac_core import KLike, _as_k
from .errors import BelowRest, InvalidParameter, SmallKx
from .shifts import ShiftVector
from .spin import _as_tau

__all__ = [
    "FieldConfig",
    "energy_at",
    "local_shift_increment",
    "propagate",
    "closed_form_trajectory",
]

_MIN_STEPS = 1000
_KX_GUARD = 0.1


@dataclass(frozen=True)
class FieldConfig:
    """Uniform field along +x.

    Attributes
    ----------
    E0field : float
        Field strength in natural units (> 0).
    charge_sign : int
        Sign of the charge, -1 for the electron.
    energy0 : float
        Energy at x = 0 in units of mc^2.
    mass : float
        Rest mass.
    """

    E0field: float
    charge_sign: int = -1
    energy0: float = 3.0
    mass: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.E0field) and self.E0field > 0):
            raise InvalidParameter("field strength must be positive")
        if self.charge_sign not in (-1, 1):
            raise InvalidParameter("charge_sign must be +1 or -1")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise InvalidParameter("mass must be positive")
        if not (math.isfinite(self.energy0) and self.energy0 > self.mass):
            raise BelowRest(f"initial energy {self.energy0} must exceed the rest mass")


def energy_at(field: FieldConfig, x: float) -> float:
    """E(x) = E0 + e E0field x (affine, no accumulation)."""
    return field.energy0 + field.E0field * x


def local_shift_increment(k: KLike, tau, energy: float, field: FieldConfig, dx: float) -> ShiftVector:
    """Lateral increment from one slab of thickness dx, in Compton wavelengths.

    ``dl = q dx / (2 kx^3 (E + m)) * ([(tau x k) . F] eta - kx^2 (tau x F))``
    with F = E0field e_x and eta = (0, ky, kz).

    Raises
    ------
    SmallKx
        If kx < 0.1 |k|, where the slab picture breaks down.
    """
    kv = _as_k(k)
    t = _as_tau(tau)
    kk = float(np.linalg.norm(kv))
    if kv[0] < _KX_GUARD * kk or kv[0] <= 0:
        raise SmallKx(f"kx = {kv[0]:.4g} below {_KX_GUARD} |k|")
    m = field.mass
    fvec = np.array([field.E0field, 0.0, 0.0])
    eta = np.array([0.0, kv[1], kv[2]])
    kx = kv[0]
    pre = field.charge_sign * dx / (2.0 * kx**3 * (energy + m))
    vec = pre * (np.cross(t, kv) @ fvec * eta - kx * kx * np.cross(t, fvec))
    return ShiftVector(float(vec[1]) * m / (2 * math.pi), float(vec[2]) * m / (2 * math.pi))


def propagate(field: FieldConfig, x_max: float, steps: int, tau) -> ShiftVector:
    """Accumulate slab increments for a beam launched along +x.

    Reflection at each slab is neglected.  The energy at the centre of slab
    i is E0 + e E0field (i + 1/2) dx.
    """
    if steps < _MIN_STEPS:
        raise InvalidParameter(f"steps must be at least {_MIN_STEPS}")
    if not (math.isfinite(x_max) and x_max >= 0):
        raise InvalidParameter("x_max must be nonnegative")
    if x_max == 0:
        return ShiftVector(0.0, 0.0)
    dx = x_max / steps
    m = field.mass
    dy = np.zeros(steps)
    dz = np.zeros(steps)
    for i in range(steps):
        e = energy_at(field, (i + 0.5) * dx)
        kk = math.sqrt(e * e - m * m)
        inc = local_shift_increment((kk, 0.0, 0.0), tau, e, field, dx)
        dy[i], dz[i] = inc.dy, inc.dz
    return ShiftVector(math.fsum(dy), math.fsum(dz))


def closed_form_trajectory(energy0: float, energy1: float, m: float = 1.0) -> float:
    """Accumulated shift magnitude between two energies, in Compton wavelengths.

    ``(1/4pi) [sqrt((xi - 1)/(xi + 1))]`` evaluated from xi0 = E0/m to xi1 = E1/m.
    """
    if energy0 <= m or energy1 <= m:
        raise BelowRest("energies must exceed the rest mass")
    if energy1 < energy0:
        raise InvalidParameter("energy1 must not be below energy0")

    def g(xi):
        return math.sqrt((xi - 1.0) / (xi + 1.0))

    return (g(energy1 / m) - g(energy0 / m)) / (4.0 * math.pi)
