"""Kernel backend selection.

The compiled extension is preferred. Setting ``ECOKIN_PURE_PYTHON=1`` forces
the pure-Python fallback, which is also used when the extension was not built.
"""
import os

from ecokin import _kernels_py as kernels_py

kernels = kernels_py
BACKEND = "python"

if os.environ.get("ECOKIN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ecokin import _kernels as kernels  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass


def compiled_kernels():
    """Return the compiled kernel module, or None if it is not importable."""
    try:
        from ecokin import _kernels
    except ImportError:
        return None
    return _kernels
