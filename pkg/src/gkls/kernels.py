"""Kernel backend selection.

The compiled extension ``gkls._kernels`` is used when it was built; otherwise
the pure-Python module ``gkls._kernels_py`` is used.  Setting the environment
variable ``GKLS_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("GKLS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

rk4_affine = _impl.rk4_affine
stored_count = _impl.stored_count

__all__ = ["BACKEND", "rk4_affine", "stored_count", "backends"]


def backends() -> dict:
    """All importable kernel modules keyed by name (used by tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
