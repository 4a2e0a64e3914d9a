"""Kernel backend selection: compiled extension if built, numpy otherwise."""

from __future__ import annotations

try:
    from . import _kernels as active  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as active  # type: ignore[no-redef]


def backend() -> str:
    """Name of the kernel backend in use ('compiled' or 'python')."""
    return active.backend_name()
