"""Hot numerical kernels, compiled when possible.

The Cython extension ``mswso._kernels`` is imported if it was built; the
pure-Python module ``mswso._kernels_py`` is used otherwise, or whenever the
environment variable ``MSWSO_PURE_PYTHON`` is set to a non-empty value other
than ``0``.  ``BACKEND`` names the implementation actually in use.
"""
import os

from . import _kernels_py

_force_pure = os.environ.get("MSWSO_PURE_PYTHON", "") not in ("", "0")

if _force_pure:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

affine_recurrence = _impl.affine_recurrence
inverse_iteration = _impl.inverse_iteration

__all__ = ["BACKEND", "affine_recurrence", "inverse_iteration"]
