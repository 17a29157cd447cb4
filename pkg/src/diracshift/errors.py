"""Exception hierarchy.

Configuration problems (bad user input, unphysical regimes) derive from
:class:`ConfigurationError`; failures detected while computing derive from
:class:`NumericalError`.  The CLI maps the two families to exit codes 2 and 3.
"""

from __future__ import annotations

__all__ = [
    "DiracShiftError",
    "ConfigurationError",
    "NumericalError",
    "KleinRegime",
    "BelowRest",
    "OutOfAngularRange",
    "InvalidParameter",
    "GrazingIncidence",
    "SmallKx",
    "DegenerateDirection",
    "ZeroMomentum",
    "EvanescentNoAngle",
    "EvanescentChannel",
    "NormalIncidenceSingular",
    "NormalIncidenceUndefined",
    "SingularMatching",
    "NonRealCurrent",
    "BranchDiscontinuity",
    "ZeroAmplitude",
    "BandCrossesCritical",
    "EmptyProfile",
]


class DiracShiftError(ValueError):
    """Base class for all package errors."""


class ConfigurationError(DiracShiftError):
    """Input parameters outside the supported physical regime."""


class NumericalError(DiracShiftError):
    """A computation could not produce a trustworthy number."""


class KleinRegime(ConfigurationError):
    """E - V0 + m <= 0: the step would open the pair-production channel."""


class BelowRest(ConfigurationError):
    """Energy at or below the rest mass."""


class OutOfAngularRange(ConfigurationError):
    """Incident angle outside the range where the formula applies."""


class InvalidParameter(ConfigurationError):
    """Generic malformed or unphysical parameter."""


class GrazingIncidence(ConfigurationError):
    """kx too small relative to |k| for a stable current ratio."""


class SmallKx(ConfigurationError):
    """kx too small for the slab-wise field approximation."""


class DegenerateDirection(ConfigurationError):
    """Momentum along -z, where the helicity spinor normalization vanishes."""


class ZeroMomentum(ConfigurationError):
    """Operation needs a direction but |k| is zero."""


class EvanescentNoAngle(ConfigurationError):
    """No transmission angle exists for an evanescent channel."""


class EvanescentChannel(ConfigurationError):
    """Transmitted quantity requested where the channel is evanescent."""


class NormalIncidenceSingular(ConfigurationError):
    """Reserved for a vanishing vector-form prefactor (never raised for m > 0)."""


class NormalIncidenceUndefined(ConfigurationError):
    """ky = kz = 0 leaves the azimuth of the special spin direction undefined."""


class SingularMatching(NumericalError):
    """The boundary matching matrix is numerically rank deficient."""


class NonRealCurrent(NumericalError):
    """A current expectation value came out with a non-negligible imaginary part."""


class BranchDiscontinuity(NumericalError):
    """A phase sampled on a finite-difference stencil jumped by more than pi/2."""


class ZeroAmplitude(NumericalError):
    """All amplitudes vanish so no phase or weight can be formed."""


class BandCrossesCritical(NumericalError):
    """The spectral band of a wavepacket reaches the first critical angle."""


class EmptyProfile(NumericalError):
    """A beam profile has zero total intensity."""
