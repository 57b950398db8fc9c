"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy fallback
is used.  Setting ``FTFORGE_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

H, S, X, SX, CX, CZ = _kernels_py.H, _kernels_py.S, _kernels_py.X, _kernels_py.SX, _kernels_py.CX, _kernels_py.CZ

_impl = _kernels_py
if os.environ.get("FTFORGE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"


def backends():
    """Available backend modules keyed by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["compiled"] = _kernels
    except ImportError:
        pass
    return out


def conjugate_rows(x, z, r, kind, a, b=-1):
    _impl.conjugate_rows(x, z, r, kind, a, b)


def canonicalize_rows(x, z, r, n):
    return _impl.canonicalize_rows(x, z, r, n)


def min_weight_rows(ex, ez, gx, gz):
    return _impl.min_weight_rows(ex, ez, gx, gz)
