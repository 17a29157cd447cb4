"""Finite-aperture beam synthesis: a numerical check of the reflected shift.

An incident beam of half-width ``a`` along z has the sinc spectrum
:func:`spectrum_F` around the central transverse wavenumber kz0.  Each
spectral component is reflected with its own amplitudes A(kz), B(kz), and the
reflected field is summed back at the interface x = 0.  The lateral shift is
the displacement of the intensity centroid relative to a reference beam in
which A and B are frozen at their kz0 values.  That reference carries
everything that is not caused by the k dependence of the reflection
amplitudes (in particular the kz dependence of the lower spinor components).

The sum over spectral nodes is the hot loop and is delegated to
:mod:`diracshift._kernel`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernel
from .errors import BandCrossesCritical, EmptyProfile, InvalidParameter
from .scattering import IncidentBeam, amplitudes_closed_form, reflection_amplitudes

__all__ = [
    "BeamProfile",
    "SpectralGrid",
    "WavepacketShift",
    "spectrum_F",
    "critical_kz",
    "choose_band",
    "incident_profile",
    "reflected_profile",
    "centroid_shift",
    "measure_reflected_shift",
]

_MAX_LOBES = 40


@dataclass(frozen=True)
class BeamProfile:
    """Intensity summed over the four spinor components on a uniform z grid."""

    z_grid: np.ndarray
    intensity: np.ndarray
    centroid: float = field(init=False)

    def __post_init__(self):
        mass = float(np.sum(self.intensity))
        c = float(np.dot(self.z_grid, self.intensity) / mass) if mass > 0 else math.nan
        object.__setattr__(self, "centroid", c)

    @property
    def mass(self) -> float:
        """Riemann-sum integral of the intensity."""
        if self.z_grid.size < 2:
            return float(np.sum(self.intensity))
        return float(np.sum(self.intensity) * (self.z_grid[1] - self.z_grid[0]))


@dataclass(frozen=True)
class SpectralGrid:
    """Sampling of the spectral integral and of the output positions.

    ``band`` is the half-width of the kz interval and ``half_width`` the
    half-extent of the z window; ``None`` selects them from the beam (see
    :func:`choose_band`).
    """

    nodes: int = 16384
    samples: int = 8192
    band: Optional[float] = None
    half_width: Optional[float] = None

    def __post_init__(self):
        if self.nodes < 2 or self.samples < 2:
            raise InvalidParameter("grid needs at least two nodes and two samples")


def spectrum_F(kz, kz0: float, a: float):
    """sqrt(2/pi) sin((kz0 - kz) a) / (kz0 - kz), the rect-aperture spectrum."""
    if not a > 0:
        raise InvalidParameter("aperture half-width must be positive")
    q = np.asarray(kz0 - np.asarray(kz, dtype=float))
    return math.sqrt(2.0 / math.pi) * a * np.sinc(q * a / math.pi)


def critical_kz(beam: IncidentBeam) -> float:
    """|kz| at which the transmitted wave stops propagating (fixed ky)."""
    cfg = beam.config
    ep = cfg.energy - cfg.barrier
    disc = ep * ep - cfg.mass**2 - beam.k.ky**2
    kpar = math.sqrt(cfg.k**2 - beam.k.ky**2)
    return min(math.sqrt(disc), kpar) if disc > 0 else 0.0


def choose_band(beam: IncidentBeam, a: float) -> float:
    """Half-width of the spectral band.

    Up to 40 sinc lobes on each side, truncated at a sinc zero so that the
    band stays 10% short of the critical wavenumber.  If not even one lobe
    fits, 90% of the gap is used.

    Raises
    ------
    BandCrossesCritical
        If kz0 itself is at or beyond the critical wavenumber.
    """
    kz0 = beam.k.kz
    kc = critical_kz(beam)
    gap = kc - abs(kz0)
    if gap <= 0:
        raise BandCrossesCritical("central wavenumber is at or past the first critical angle")
    lobes = min(_MAX_LOBES, int(math.floor(0.9 * gap * a / math.pi)))
    return lobes * math.pi / a if lobes >= 1 else 0.9 * gap


def _layout(beam: IncidentBeam, a: float, grid: SpectralGrid):
    if not a > 0:
        raise InvalidParameter("aperture half-width must be positive")
    kz0 = beam.k.kz
    band = grid.band if grid.band is not None else choose_band(beam, a)
    kc = critical_kz(beam)
    if band <= 0:
        raise InvalidParameter("band must be positive")
    if abs(kz0) + band >= kc:
        raise BandCrossesCritical(
            f"band [{kz0 - band:.4f}, {kz0 + band:.4f}] reaches the critical wavenumber {kc:.4f}"
        )
    zw = grid.half_width if grid.half_width is not None else max(4.0 * a, _MAX_LOBES * math.pi / band)
    dk = 2.0 * band / grid.nodes
    kz = kz0 - band + dk * (np.arange(grid.nodes) + 0.5)
    z = np.linspace(-zw, zw, grid.samples)
    return kz, dk, z


def _reflected_columns(beam: IncidentBeam, kz: np.ndarray, frozen: bool):
    cfg = beam.config
    e, m = cfg.energy, cfg.mass
    ky = beam.k.ky
    kx = np.sqrt(cfg.k**2 - ky * ky - kz * kz)
    if frozen:
        amps = amplitudes_closed_form(beam)
        A = np.full(kz.shape, amps.A, dtype=complex)
        B = np.full(kz.shape, amps.B, dtype=complex)
    else:
        A, B = reflection_amplitudes(cfg, beam.chi, ky, kz)
    # reflected momentum (-kx, ky, kz)
    return np.stack(
        [
            (e + m) * A,
            (e + m) * B,
            kz * A + (-kx - 1j * ky) * B,
            (-kx + 1j * ky) * A - kz * B,
        ]
    )


def _incident_columns(beam: IncidentBeam, kz: np.ndarray):
    cfg = beam.config
    e, m = cfg.energy, cfg.mass
    ky = beam.k.ky
    kx = np.sqrt(cfg.k**2 - ky * ky - kz * kz)
    l1, l2 = beam.chi.l1, beam.chi.l2
    ones = np.ones(kz.shape)
    return np.stack(
        [
            (e + m) * l1 * ones,
            (e + m) * l2 * ones,
            kz * l1 + (kx - 1j * ky) * l2,
            (kx + 1j * ky) * l1 - kz * l2,
        ]
    )


def _synthesize(columns: np.ndarray, kz: np.ndarray, dk: float, z: np.ndarray, kz0: float, a: float):
    weights = spectrum_F(kz, kz0, a) * dk
    coef = columns * weights[None, :]
    return _kernel.synthesize(coef, float(kz[0]), dk, z)


def _intensity(field_: np.ndarray) -> np.ndarray:
    return np.sum(field_.real**2 + field_.imag**2, axis=0)


def incident_profile(beam: IncidentBeam, a: float, grid: Optional[SpectralGrid] = None) -> BeamProfile:
    """Incident intensity at x = 0 with the same sampling as the reflected beam."""
    grid = grid or SpectralGrid()
    kz, dk, z = _layout(beam, a, grid)
    fld = _synthesize(_incident_columns(beam, kz), kz, dk, z, beam.k.kz, a)
    return BeamProfile(z, _intensity(fld))


def reflected_profile(
    beam: IncidentBeam, a: float, grid: Optional[SpectralGrid] = None, *, frozen: bool = False
) -> BeamProfile:
    """Reflected intensity at x = 0.

    Parameters
    ----------
    beam : IncidentBeam
        Central plane wave (its kz is the beam centre kz0).
    a : float
        Aperture half-width in hbar/(mc).
    grid : SpectralGrid, optional
        Sampling; defaults to 16384 nodes and 8192 positions.
    frozen : bool
        Hold A and B at their kz0 values (the reference beam).

    Raises
    ------
    BandCrossesCritical
        If the spectral band reaches the first critical angle.
    """
    grid = grid or SpectralGrid()
    kz, dk, z = _layout(beam, a, grid)
    fld = _synthesize(_reflected_columns(beam, kz, frozen), kz, dk, z, beam.k.kz, a)
    return BeamProfile(z, _intensity(fld))


def centroid_shift(profile: BeamProfile, reference: float, mass: float = 1.0) -> float:
    """(centroid - reference) in Compton wavelengths.

    Raises
    ------
    EmptyProfile
        If the profile carries no intensity.
    """
    if not np.sum(profile.intensity) > 0:
        raise EmptyProfile("profile has zero intensity")
    return (profile.centroid - reference) * mass / (2.0 * math.pi)


@dataclass(frozen=True)
class WavepacketShift:
    """Result of one synthesized measurement."""

    shift: float
    profile: BeamProfile
    reference: BeamProfile
    band: float


def measure_reflected_shift(beam: IncidentBeam, a: float, grid: Optional[SpectralGrid] = None) -> WavepacketShift:
    """Measured reflected z shift (Compton wavelengths) of a beam of half-width a.

    The measured and the frozen-amplitude reference fields are summed in a
    single kernel call.
    """
    grid = grid or SpectralGrid()
    kz, dk, z = _layout(beam, a, grid)
    cols = np.concatenate([_reflected_columns(beam, kz, False), _reflected_columns(beam, kz, True)])
    fld = _synthesize(cols, kz, dk, z, beam.k.kz, a)
    prof = BeamProfile(z, _intensity(fld[:4]))
    ref = BeamProfile(z, _intensity(fld[4:]))
    if not np.sum(ref.intensity) > 0:
        raise EmptyProfile("no reflected intensity")
    return WavepacketShift(centroid_shift(prof, ref.centroid, beam.config.mass), prof, ref, (kz[-1] - kz[0] + dk) / 2)
