"""Backend selection for the hot numeric kernels.

The shortest-path solver and the per-edge weight transforms exist in two
interchangeable implementations: numba-jitted loops and a pure
numpy/scipy path. The default is chosen once at import from the
``EVNAV_BACKEND`` environment variable ("numba", "numpy", or unset for
auto-detection) and can be switched at runtime with :func:`set_backend`,
which the cross-backend tests and the benchmark script rely on.
"""

from __future__ import annotations

import contextlib
import os

ENV_VAR = "EVNAV_BACKEND"
BACKENDS = ("numba", "numpy")


def _numba_importable() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _detect() -> str:
    forced = os.environ.get(ENV_VAR, "").strip().lower()
    if forced:
        if forced not in BACKENDS:
            raise ValueError(
                f"{ENV_VAR}={forced!r} is not one of {BACKENDS}"
            )
        if forced == "numba" and not _numba_importable():
            raise ImportError(f"{ENV_VAR}=numba but numba is not installed")
        return forced
    return "numba" if _numba_importable() else "numpy"


_active = _detect()


def backend() -> str:
    """Name of the currently active kernel backend."""
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}, expected one of {BACKENDS}")
    if name == "numba" and not _numba_importable():
        raise ImportError("numba backend requested but numba is not installed")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch backends (tests and benchmarks)."""
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)
