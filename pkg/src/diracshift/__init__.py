"""Spin-dependent lateral shifts of Dirac plane waves at a potential step.

Units: hbar = c = 1 and m = 1 by default.  Public shifts are in Compton
wavelengths h/(mc); angles inside the library are radians.
"""

__version__ = "0.1.0"

from ._kernel import BACKEND
from .errors import ConfigurationError, DiracShiftError, NumericalError
from .scattering import (
    BarrierConfig,
    IncidentBeam,
    ScatteringAmplitudes,
    amplitudes_closed_form,
    coefficients,
    critical_angles,
    matching_solve,
)
from .shifts import (
    ShiftVector,
    fd_shift,
    fd_shift_oracle,
    shift_reflected_ky0,
    shift_reflected_vector,
    shift_transmitted_ky0,
    shift_transmitted_vector,
)
from .spin import BlochVector, SpinState, bloch_from_chi, chi_from_bloch

__all__ = [
    "__version__",
    "BACKEND",
    "ConfigurationError",
    "DiracShiftError",
    "NumericalError",
    "BarrierConfig",
    "IncidentBeam",
    "ScatteringAmplitudes",
    "amplitudes_closed_form",
    "coefficients",
    "critical_angles",
    "matching_solve",
    "ShiftVector",
    "fd_shift",
    "fd_shift_oracle",
    "shift_reflected_ky0",
    "shift_reflected_vector",
    "shift_transmitted_ky0",
    "shift_transmitted_vector",
    "BlochVector",
    "SpinState",
    "bloch_from_chi",
    "chi_from_bloch",
]
