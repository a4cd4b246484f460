"""Kernel backend selection.

Imports the compiled extension if it was built, otherwise falls back to
the pure-Python implementations.  Setting the environment variable
``NVCOOL_PURE_PYTHON=1`` before import forces the fallback (useful for
debugging and for the backend-comparison benchmark).
"""

import os

from . import kernels_py
from .kernels_py import (  # noqa: F401 - layout constants are part of the API
    N_PAR, N_UNDRIVEN, N_DRIVEN, N_RATE,
    PAR_XI, PAR_KSP, PAR_K47, PAR_K57, PAR_K67,
    PAR_K71, PAR_K72, PAR_K73,
    PAR_K31, PAR_K13, PAR_K21, PAR_K12,
    PAR_CHI3, PAR_KAPPA, PAR_NTH, PAR_G, PAR_NSPINS,
    PAR_DELTA, PAR_ETA, PAR_DELTA_M, PAR_DELTA_3,
)

__all__ = [
    "BACKEND", "undriven_rhs_flat", "driven_rhs_flat", "rate_rhs_flat",
    "N_PAR", "N_UNDRIVEN", "N_DRIVEN", "N_RATE",
    "PAR_XI", "PAR_KSP", "PAR_K47", "PAR_K57", "PAR_K67",
    "PAR_K71", "PAR_K72", "PAR_K73",
    "PAR_K31", "PAR_K13", "PAR_K21", "PAR_K12",
    "PAR_CHI3", "PAR_KAPPA", "PAR_NTH", "PAR_G", "PAR_NSPINS",
    "PAR_DELTA", "PAR_ETA", "PAR_DELTA_M", "PAR_DELTA_3",
]

if os.environ.get("NVCOOL_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = kernels_py
        BACKEND = "python"

undriven_rhs_flat = _impl.undriven_rhs_flat
driven_rhs_flat = _impl.driven_rhs_flat
rate_rhs_flat = _impl.rate_rhs_flat
