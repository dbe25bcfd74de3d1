# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot numerical kernels.

Mirrors `phasefront._kernels_py`; arithmetic is written in the same
per-element order so both backends agree to rounding error.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, tanh

cnp.import_array()

BACKEND_NAME = "compiled"


cdef void _fd1_row(const double[::1] f, double denom, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t i, m2, m1, p1, p2
    for i in range(n):
        m2 = i - 2 if i >= 2 else i - 2 + n
        m1 = i - 1 if i >= 1 else i - 1 + n
        p1 = i + 1 if i + 1 < n else i + 1 - n
        p2 = i + 2 if i + 2 < n else i + 2 - n
        out[i] = (f[m2] - 8.0 * f[m1] + 8.0 * f[p1] - f[p2]) / denom


cdef void _fd2_row(const double[::1] f, double denom, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t i, m2, m1, p1, p2
    for i in range(n):
        m2 = i - 2 if i >= 2 else i - 2 + n
        m1 = i - 1 if i >= 1 else i - 1 + n
        p1 = i + 1 if i + 1 < n else i + 1 - n
        p2 = i + 2 if i + 2 < n else i + 2 - n
        out[i] = (-f[m2] + 16.0 * f[m1] - 30.0 * f[i] + 16.0 * f[p1] - f[p2]) / denom


def fd1_periodic(f, double dx):
    """4th-order central first derivative along the last axis, periodic."""
    arr = np.ascontiguousarray(f, dtype=np.float64)
    out = np.empty_like(arr)
    cdef double denom = 12.0 * dx
    cdef double[:, ::1] a2, o2
    cdef Py_ssize_t r
    if arr.ndim == 1:
        _fd1_row(arr, denom, out)
    elif arr.ndim == 2:
        a2, o2 = arr, out
        with nogil:
            for r in range(a2.shape[0]):
                _fd1_row(a2[r], denom, o2[r])
    else:
        raise ValueError("expected a 1D or 2D array")
    return out


def fd2_periodic(f, double dx):
    """4th-order central second derivative along the last axis, periodic."""
    arr = np.ascontiguousarray(f, dtype=np.float64)
    out = np.empty_like(arr)
    cdef double denom = 12.0 * dx * dx
    cdef double[:, ::1] a2, o2
    cdef Py_ssize_t r
    if arr.ndim == 1:
        _fd2_row(arr, denom, out)
    elif arr.ndim == 2:
        a2, o2 = arr, out
        with nogil:
            for r in range(a2.shape[0]):
                _fd2_row(a2[r], denom, o2[r])
    else:
        raise ValueError("expected a 1D or 2D array")
    return out


def allen_cahn_rhs_core(phi, double a, double D, double dx, double dy):
    """Fused reaction-diffusion right-hand side (see the NumPy twin)."""
    arr = np.ascontiguousarray(phi, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2D field")
    out = np.empty_like(arr)
    cdef double[:, ::1] p = arr
    cdef double[:, ::1] o = out
    cdef Py_ssize_t n_y = p.shape[0], n_x = p.shape[1]
    cdef Py_ssize_t i, j, jm, jp
    cdef double dx2 = dx * dx
    cdef double dy2 = dy * dy
    cdef double lap, ypart, v
    with nogil:
        for i in range(n_y):
            for j in range(n_x):
                jm = j - 1 if j >= 1 else n_x - 1
                jp = j + 1 if j + 1 < n_x else 0
                v = p[i, j]
                if i == 0:
                    ypart = 2.0 * (p[1, j] - v)
                elif i == n_y - 1:
                    ypart = 2.0 * (p[n_y - 2, j] - v)
                else:
                    ypart = p[i + 1, j] - 2.0 * v + p[i - 1, j]
                lap = (p[i, jm] - 2.0 * v + p[i, jp]) / dx2 + ypart / dy2
                o[i, j] = D * lap - (v - a) * (v * v - 1.0)
    return out


def tanh_fit_batch(y, cols, c0, d0, int max_iter, double step_tol, double lam0=1e-3):
    """Fit tanh(c*y - d) per column by damped Gauss-Newton.

    Same update rule, damping schedule and convergence test as the NumPy
    twin; see there for the contract.
    """
    y_arr = np.ascontiguousarray(y, dtype=np.float64)
    cols_arr = np.ascontiguousarray(cols, dtype=np.float64)
    if cols_arr.ndim != 2 or cols_arr.shape[0] != y_arr.shape[0]:
        raise ValueError("cols must be (len(y), m)")
    c_arr = np.array(c0, dtype=np.float64, copy=True)
    d_arr = np.array(d0, dtype=np.float64, copy=True)
    conv_arr = np.zeros(cols_arr.shape[1], dtype=np.uint8)
    cost_arr = np.empty(cols_arr.shape[1], dtype=np.float64)

    cdef double[::1] yv = y_arr
    cdef double[:, ::1] col = cols_arr
    cdef double[::1] c = c_arr
    cdef double[::1] d = d_arr
    cdef unsigned char[::1] conv = conv_arr
    cdef double[::1] cost_out = cost_arr
    cdef Py_ssize_t n = yv.shape[0], m = col.shape[1]
    cdef Py_ssize_t k, i, it
    cdef double lam, cost, cost_t, ck, dk, ct, dt
    cdef double th, s2, jc, jd, r
    cdef double a11, a12, a22, g1, g2, b11, b22, det, dc, dd, step

    with nogil:
        for k in range(m):
            ck = c[k]
            dk = d[k]
            lam = lam0
            cost = 0.0
            for i in range(n):
                r = tanh(ck * yv[i] - dk) - col[i, k]
                cost += r * r
            for it in range(max_iter):
                a11 = 0.0; a12 = 0.0; a22 = 0.0; g1 = 0.0; g2 = 0.0
                for i in range(n):
                    th = tanh(ck * yv[i] - dk)
                    s2 = 1.0 - th * th
                    jc = yv[i] * s2
                    jd = -s2
                    r = th - col[i, k]
                    a11 += jc * jc
                    a12 += jc * jd
                    a22 += jd * jd
                    g1 += jc * r
                    g2 += jd * r
                b11 = a11 * (1.0 + lam)
                b22 = a22 * (1.0 + lam)
                det = b11 * b22 - a12 * a12
                if det <= 0.0:
                    break
                dc = -(b22 * g1 - a12 * g2) / det
                dd = -(-a12 * g1 + b11 * g2) / det
                ct = ck + dc
                dt = dk + dd
                cost_t = 0.0
                for i in range(n):
                    r = tanh(ct * yv[i] - dt) - col[i, k]
                    cost_t += r * r
                if cost_t <= cost:
                    ck = ct
                    dk = dt
                    cost = cost_t
                    lam = lam * 0.3
                    if lam < 1e-12:
                        lam = 1e-12
                    step = sqrt(dc * dc + dd * dd)
                    if step < step_tol:
                        conv[k] = 1
                        break
                else:
                    lam = lam * 10.0
            c[k] = ck
            d[k] = dk
            cost_out[k] = cost

    return c_arr, d_arr, conv_arr.astype(bool), cost_arr
