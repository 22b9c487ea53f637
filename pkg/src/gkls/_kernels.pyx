# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled RK4 kernel for affine fields (same loop as ``_kernels_py``)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()

QBIT = 0
GAUSSIAN = 1


cdef inline double _residual(int kind_code, double x0, double x1, double x2) noexcept nogil:
    cdef double q
    if kind_code == 0:
        return 1.0 - (x0 * x0 + x1 * x1 + x2 * x2)
    q = x0 * x0 - x1 * x1 - x2 * x2 - 1.0
    if x0 > 0.0:
        return q
    return q if q < x0 else x0


def stored_count(Py_ssize_t n_steps, Py_ssize_t monitor_every):
    cdef Py_ssize_t m = n_steps // monitor_every
    if n_steps % monitor_every:
        m += 1
    return m + 1


def rk4_affine(A, c, p0, double t0, double dt, Py_ssize_t n_full, double last_dt,
               Py_ssize_t monitor_every, int kind_code, double drift_tol):
    cdef const double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[::1] cc = np.ascontiguousarray(c, dtype=np.float64)
    cdef double a00 = a[0, 0], a01 = a[0, 1], a02 = a[0, 2]
    cdef double a10 = a[1, 0], a11 = a[1, 1], a12 = a[1, 2]
    cdef double a20 = a[2, 0], a21 = a[2, 1], a22 = a[2, 2]
    cdef double c0 = cc[0], c1 = cc[1], c2 = cc[2]
    cdef double x0 = float(p0[0]), x1 = float(p0[1]), x2 = float(p0[2])
    cdef Py_ssize_t n_steps = n_full + (1 if last_dt > 0.0 else 0)
    cdef Py_ssize_t m = stored_count(n_steps, monitor_every)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] times_arr = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts_arr = np.empty((m, 3))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] res_arr = np.empty(m)
    cdef double[::1] times = times_arr
    cdef double[:, ::1] pts = pts_arr
    cdef double[::1] res = res_arr
    cdef double t_end = t0 + n_full * dt + (last_dt if last_dt > 0.0 else 0.0)
    cdef double h, hh, s, r
    cdef double k10, k11, k12, k20, k21, k22, k30, k31, k32, k40, k41, k42, y0, y1, y2
    cdef Py_ssize_t k, j = 1
    cdef int fail = -1

    times[0] = t0
    pts[0, 0] = x0
    pts[0, 1] = x1
    pts[0, 2] = x2
    r = _residual(kind_code, x0, x1, x2)
    res[0] = r
    if not (r >= -drift_tol):
        return times_arr[:1], pts_arr[:1], res_arr[:1], 0
    with nogil:
        for k in range(1, n_steps + 1):
            h = dt if k <= n_full else last_dt
            hh = 0.5 * h
            k10 = a00 * x0 + a01 * x1 + a02 * x2 + c0
            k11 = a10 * x0 + a11 * x1 + a12 * x2 + c1
            k12 = a20 * x0 + a21 * x1 + a22 * x2 + c2
            y0 = x0 + hh * k10
            y1 = x1 + hh * k11
            y2 = x2 + hh * k12
            k20 = a00 * y0 + a01 * y1 + a02 * y2 + c0
            k21 = a10 * y0 + a11 * y1 + a12 * y2 + c1
            k22 = a20 * y0 + a21 * y1 + a22 * y2 + c2
            y0 = x0 + hh * k20
            y1 = x1 + hh * k21
            y2 = x2 + hh * k22
            k30 = a00 * y0 + a01 * y1 + a02 * y2 + c0
            k31 = a10 * y0 + a11 * y1 + a12 * y2 + c1
            k32 = a20 * y0 + a21 * y1 + a22 * y2 + c2
            y0 = x0 + h * k30
            y1 = x1 + h * k31
            y2 = x2 + h * k32
            k40 = a00 * y0 + a01 * y1 + a02 * y2 + c0
            k41 = a10 * y0 + a11 * y1 + a12 * y2 + c1
            k42 = a20 * y0 + a21 * y1 + a22 * y2 + c2
            s = h / 6.0
            x0 = x0 + s * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
            x1 = x1 + s * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
            x2 = x2 + s * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
            if k % monitor_every == 0 or k == n_steps:
                times[j] = t_end if k == n_steps else t0 + k * dt
                pts[j, 0] = x0
                pts[j, 1] = x1
                pts[j, 2] = x2
                r = _residual(kind_code, x0, x1, x2)
                res[j] = r
                j += 1
                if not (r >= -drift_tol) or not (isfinite(x0) and isfinite(x1) and isfinite(x2)):
                    fail = <int>(j - 1)
                    break
    if fail >= 0:
        return times_arr[:j], pts_arr[:j], res_arr[:j], fail
    return times_arr, pts_arr, res_arr, -1
