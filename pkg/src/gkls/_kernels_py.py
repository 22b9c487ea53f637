"""Pure-Python RK4 kernel for affine fields.

Fallback for the compiled ``_kernels`` extension; both implement the same
loop with the same floating-point operation order.
"""
from __future__ import annotations

import math

import numpy as np

QBIT = 0
GAUSSIAN = 1


def _residual(kind_code, x0, x1, x2):
    if kind_code == QBIT:
        return 1.0 - (x0 * x0 + x1 * x1 + x2 * x2)
    q = x0 * x0 - x1 * x1 - x2 * x2 - 1.0
    if x0 > 0.0:
        return q
    return q if q < x0 else x0


def stored_count(n_steps, monitor_every):
    """Number of stored samples: the start, every monitored step and the end."""
    m = n_steps // monitor_every
    if n_steps % monitor_every:
        m += 1
    return m + 1


def rk4_affine(A, c, p0, t0, dt, n_full, last_dt, monitor_every, kind_code, drift_tol):
    """Classical RK4 for p' = A p + c.

    Takes ``n_full`` steps of size ``dt`` followed by one step of ``last_dt``
    when that is positive.  Samples are stored at step 0, at every
    ``monitor_every``-th step and at the final step; each sample's
    physicality residual is checked against ``-drift_tol``.

    Returns ``(times, points, residuals, fail)`` where ``fail`` is -1 on
    success, otherwise the index of the offending stored sample (arrays are
    truncated after it).
    """
    a = [[float(A[i][j]) for j in range(3)] for i in range(3)]
    a00, a01, a02 = a[0]
    a10, a11, a12 = a[1]
    a20, a21, a22 = a[2]
    c0, c1, c2 = float(c[0]), float(c[1]), float(c[2])
    x0, x1, x2 = float(p0[0]), float(p0[1]), float(p0[2])
    n_steps = n_full + (1 if last_dt > 0.0 else 0)
    m = stored_count(n_steps, monitor_every)
    times = np.empty(m)
    pts = np.empty((m, 3))
    res = np.empty(m)
    t_end = t0 + n_full * dt + (last_dt if last_dt > 0.0 else 0.0)

    times[0] = t0
    pts[0, 0], pts[0, 1], pts[0, 2] = x0, x1, x2
    r = _residual(kind_code, x0, x1, x2)
    res[0] = r
    if not (r >= -drift_tol):
        return times[:1], pts[:1], res[:1], 0
    j = 1
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
            pts[j, 0], pts[j, 1], pts[j, 2] = x0, x1, x2
            r = _residual(kind_code, x0, x1, x2)
            res[j] = r
            j += 1
            if not (r >= -drift_tol) or not (math.isfinite(x0) and math.isfinite(x1) and math.isfinite(x2)):
                return times[:j], pts[:j], res[:j], j - 1
    return times, pts, res, -1
