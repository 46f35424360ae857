# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled radial-function kernels.

Same contract as :mod:`dualmink._fallback`; see that module for details.
The planar and spatial cases get unrolled dot products, and the division
``h_i / (u . v_i)`` is only carried out for facets that can improve the
running minimum.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, pow

cnp.import_array()

# Facets are screened by s = (u . v_i) / h_i, which is positive exactly when
# u . v_i > 0 and largest for the minimizing facet.  Only facets with s above
# a slightly relaxed threshold reach the exact h_i / (u . v_i) < best test, so
# results match the plain division loop while the hot branch stays predictable.
cdef double RELAX = 1.0 - 1e-12


cdef inline long long _argmin(const double* u, const double* V, const double* h,
                              const double* invh, Py_ssize_t m, Py_ssize_t n,
                              double* out) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double d, r, best = INFINITY, thresh = 0.0
    cdef long long arg = -1
    cdef double u0 = u[0], u1 = u[1], u2 = u[2] if n > 2 else 0.0
    for i in range(m):
        if n == 2:
            d = u0 * V[2 * i] + u1 * V[2 * i + 1]
        elif n == 3:
            d = u0 * V[3 * i] + u1 * V[3 * i + 1] + u2 * V[3 * i + 2]
        else:
            d = 0.0
            for j in range(n):
                d = d + u[j] * V[n * i + j]
        if d * invh[i] > thresh:
            r = h[i] / d
            if r < best:
                best = r
                arg = i
                thresh = RELAX / best
    out[0] = best
    return arg


def radial_cells(const double[:, ::1] U, const double[:, ::1] V, const double[::1] h):
    cdef Py_ssize_t N = U.shape[0], n = U.shape[1], m = V.shape[0], k
    rho_arr = np.empty(N, dtype=np.float64)
    cell_arr = np.empty(N, dtype=np.int64)
    cdef double[::1] rho = rho_arr
    cdef long long[::1] cell = cell_arr
    if N == 0 or m == 0:
        rho_arr.fill(np.inf)
        cell_arr.fill(-1)
        return rho_arr, cell_arr
    cdef const double* up = &U[0, 0]
    cdef const double* vp = &V[0, 0]
    cdef const double* hp = &h[0]
    cdef double[::1] invh = 1.0 / np.asarray(h)
    cdef const double* ip = &invh[0]
    with nogil:
        for k in range(N):
            cell[k] = _argmin(up + n * k, vp, hp, ip, m, n, &rho[k])
    return rho_arr, cell_arr


def cell_moments(const double[:, ::1] U, const double[:, ::1] V, const double[::1] h, double q):
    cdef Py_ssize_t N = U.shape[0], n = U.shape[1], m = V.shape[0], k
    cdef double best, f
    cdef long long arg
    s1_arr = np.zeros(m, dtype=np.float64)
    s2_arr = np.zeros(m, dtype=np.float64)
    if N == 0 or m == 0:
        return s1_arr, s2_arr
    cdef double[::1] s1 = s1_arr
    cdef double[::1] s2 = s2_arr
    cdef const double* up = &U[0, 0]
    cdef const double* vp = &V[0, 0]
    cdef const double* hp = &h[0]
    cdef double[::1] invh = 1.0 / np.asarray(h)
    cdef const double* ip = &invh[0]
    with nogil:
        for k in range(N):
            arg = _argmin(up + n * k, vp, hp, ip, m, n, &best)
            if arg >= 0:
                f = pow(best, q)
                s1[arg] += f
                s2[arg] += f * f
    return s1_arr, s2_arr
