"""Kernel backend selection.

Hot loops ship twice: a numba ``@njit`` version and a numpy/scipy version.
Set ``STRUCTACK_DISABLE_NUMBA=1`` (or run without numba installed) to force
the numpy path. ``use_backend`` overrides the choice for a block of code,
which is what the tests and the benchmark use to compare both paths.
"""
from __future__ import annotations

import contextlib
import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

BACKENDS = ("numba", "numpy")

_override: str | None = None


def _env_backend() -> str:
    flag = os.environ.get("STRUCTACK_DISABLE_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes", "on") or not HAVE_NUMBA:
        return "numpy"
    return "numba"


def active_backend() -> str:
    """Name of the backend kernels dispatch to right now."""
    if _override is not None:
        return _override
    return _env_backend()


@contextlib.contextmanager
def use_backend(name: str):
    global _override
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}, expected one of {BACKENDS}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    previous = _override
    _override = name
    try:
        yield
    finally:
        _override = previous


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
