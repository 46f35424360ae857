"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``DUALMINK_PURE=1`` to force the numpy path.
"""
import os

import numpy as np

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("DUALMINK_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback


def _prep(U, V, h):
    return (np.ascontiguousarray(U, dtype=np.float64),
            np.ascontiguousarray(V, dtype=np.float64),
            np.ascontiguousarray(h, dtype=np.float64))


def radial_cells(U, V, h):
    """Return ``(rho, cell)`` for directions ``U`` against facets ``(V, h)``."""
    U, V, h = _prep(U, V, h)
    return _impl.radial_cells(U, V, h)


def cell_moments(U, V, h, q):
    """Return per-facet sums of ``rho**q`` and ``rho**(2q)``."""
    U, V, h = _prep(U, V, h)
    return _impl.cell_moments(U, V, h, float(q))
