# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled matrix-free CG for the scaled stencil ``diag_i u - (4 neighbours)``.

The unknowns are the interior nodes, stored as ``u[j, i]`` with ``j`` the
x index and ``i`` the xi index.  Inner products are accumulated in a single
sequential loop, so the result does not depend on thread scheduling.
"""

import numpy as np
from libc.math cimport sqrt

KERNEL = "compiled"


cdef void _apply(const double[:, ::1] u, const double[::1] diag, double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t nx = u.shape[0]
    cdef Py_ssize_t nxi = u.shape[1]
    cdef Py_ssize_t j, i
    cdef double s
    for j in range(nx):
        for i in range(nxi):
            s = diag[i] * u[j, i]
            if i > 0:
                s -= u[j, i - 1]
            if i < nxi - 1:
                s -= u[j, i + 1]
            if j > 0:
                s -= u[j - 1, i]
            if j < nx - 1:
                s -= u[j + 1, i]
            out[j, i] = s


cdef double _dot(const double[:, ::1] a, const double[:, ::1] b) noexcept nogil:
    cdef Py_ssize_t j, i
    cdef double s = 0.0
    for j in range(a.shape[0]):
        for i in range(a.shape[1]):
            s += a[j, i] * b[j, i]
    return s


def apply_stencil(u, diag):
    cdef double[:, ::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[::1] dd = np.ascontiguousarray(diag, dtype=np.float64)
    out = np.empty_like(np.asarray(uu))
    cdef double[:, ::1] oo = out
    with nogil:
        _apply(uu, dd, oo)
    return out


def cg_stencil(b, diag, double tol, Py_ssize_t max_iter):
    """Solve the stencil system from a zero start.

    Returns ``(u, iterations, relative_residual, converged)``.
    """
    cdef double[:, ::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] dd = np.ascontiguousarray(diag, dtype=np.float64)
    x_arr = np.zeros_like(np.asarray(bb))
    r_arr = np.array(bb, copy=True)
    p_arr = np.array(bb, copy=True)
    q_arr = np.empty_like(r_arr)
    cdef double[:, ::1] x = x_arr
    cdef double[:, ::1] r = r_arr
    cdef double[:, ::1] p = p_arr
    cdef double[:, ::1] q = q_arr
    cdef Py_ssize_t nx = bb.shape[0]
    cdef Py_ssize_t nxi = bb.shape[1]
    cdef Py_ssize_t it = 0, j, i
    cdef double bnorm, rr, rr_new, alpha, beta
    with nogil:
        bnorm = sqrt(_dot(bb, bb))
        rr = _dot(r, r)
        if bnorm == 0.0:
            bnorm = 1.0
        while sqrt(rr) > tol * bnorm and it < max_iter:
            _apply(p, dd, q)
            alpha = rr / _dot(p, q)
            for j in range(nx):
                for i in range(nxi):
                    x[j, i] += alpha * p[j, i]
                    r[j, i] -= alpha * q[j, i]
            rr_new = _dot(r, r)
            beta = rr_new / rr
            rr = rr_new
            for j in range(nx):
                for i in range(nxi):
                    p[j, i] = r[j, i] + beta * p[j, i]
            it += 1
    relres = sqrt(rr) / bnorm
    return x_arr, int(it), float(relres), bool(relres <= tol)
