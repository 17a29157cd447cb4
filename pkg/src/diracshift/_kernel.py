"""Select the spectral summation backend at import time.

The compiled extension is used when it is importable; setting the
environment variable ``DIRACSHIFT_PURE_PYTHON=1`` forces the numpy version.
"""

from __future__ import annotations

import os

from . import _spectral_py

__all__ = ["synthesize", "BACKEND", "available_backends", "get_backend"]

_FORCE_PURE = os.environ.get("DIRACSHIFT_PURE_PYTHON", "").strip() not in ("", "0")

try:
    from . import _spectral as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not _FORCE_PURE:
    synthesize = _compiled.synthesize
    BACKEND = "cython"
else:
    synthesize = _spectral_py.synthesize
    BACKEND = "numpy"


def available_backends() -> dict:
    """Map of backend name to its ``synthesize`` callable."""
    out = {"numpy": _spectral_py.synthesize}
    if _compiled is not None:
        out["cython"] = _compiled.synthesize
    return out


def get_backend(name: str):
    try:
        return available_backends()[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available") from None
