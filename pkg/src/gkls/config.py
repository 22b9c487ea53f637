"""Global configuration for the reduced Planck constant.

Every formula in the package carries hbar symbolically.  Functions accept an
optional ``hbar`` argument; when it is omitted the module-level value set here
is used.  The default is 1.0.
"""
from __future__ import annotations

import contextlib
import math

_HBAR = 1.0


def get_hbar() -> float:
    """Return the currently configured hbar."""
    return _HBAR


def set_hbar(value: float) -> None:
    """Set the global hbar.  Must be a finite positive number."""
    global _HBAR
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"hbar must be finite and positive, got {value!r}")
    _HBAR = value


def resolve_hbar(hbar: float | None) -> float:
    """Return ``hbar`` if given, otherwise the global value."""
    if hbar is None:
        return _HBAR
    hbar = float(hbar)
    if not math.isfinite(hbar) or hbar <= 0.0:
        raise ValueError(f"hbar must be finite and positive, got {hbar!r}")
    return hbar


@contextlib.contextmanager
def hbar_scope(value: float):
    """Temporarily override the global hbar inside a ``with`` block."""
    old = _HBAR
    set_hbar(value)
    try:
        yield value
    finally:
        set_hbar(old)
