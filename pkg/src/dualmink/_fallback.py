"""Pure-numpy versions of the radial kernels.

Both functions take unit directions ``U`` of shape (N, n), facet normals
``V`` of shape (m, n) and support numbers ``h`` of shape (m,).
"""
import numpy as np

# rows per block; bounds the (block, m) temporary
_BLOCK = 8192


def radial_cells(U, V, h):
    """Radial function and lowest-index argmin facet for every row of ``U``.

    Rows with no facet satisfying ``u . v_i > 0`` get ``rho = inf`` and
    ``cell = -1``.
    """
    U = np.ascontiguousarray(U, dtype=np.float64)
    N = U.shape[0]
    rho = np.empty(N)
    cell = np.empty(N, dtype=np.int64)
    for start in range(0, N, _BLOCK):
        D = U[start:start + _BLOCK] @ V.T
        with np.errstate(divide="ignore", invalid="ignore"):
            R = np.where(D > 0.0, h / D, np.inf)
        arg = np.argmin(R, axis=1)
        best = R[np.arange(R.shape[0]), arg]
        bad = ~np.isfinite(best)
        arg[bad] = -1
        rho[start:start + _BLOCK] = best
        cell[start:start + _BLOCK] = arg
    return rho, cell


def cell_moments(U, V, h, q):
    """Per-facet sums of ``rho**q`` and ``rho**(2q)`` over the argmin cells."""
    rho, cell = radial_cells(U, V, h)
    m = V.shape[0]
    ok = cell >= 0
    f = rho[ok] ** q
    s1 = np.bincount(cell[ok], weights=f, minlength=m).astype(np.float64)
    s2 = np.bincount(cell[ok], weights=f * f, minlength=m).astype(np.float64)
    return s1, s2
