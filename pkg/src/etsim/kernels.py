"""Kernel backend selection.

The compiled extension is preferred; the pure-numpy fallback is used when the
extension is unavailable or when ETSIM_PURE_PYTHON is set (useful for
debugging and for the backend benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("ETSIM_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

BANDWIDTH = _kernels_py.BANDWIDTH

residual = _impl.residual
jacobian_banded = _impl.jacobian_banded


def available_backends() -> dict:
    """Map backend name -> kernel module, for parity tests and benchmarks."""
    backends = {"python": _kernels_py}
    try:
        from . import _kernels

        backends["cython"] = _kernels
    except ImportError:
        pass
    return backends
