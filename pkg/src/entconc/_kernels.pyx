# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``."""
from libc.math cimport lgamma, log, log2, INFINITY
import numpy as np

cdef double LN2 = log(2.0)


def log2_dim_v_rows(parts):
    cdef long long[:, ::1] a = np.ascontiguousarray(parts, dtype=np.int64)
    cdef Py_ssize_t m = a.shape[0], d = a.shape[1], r, i, j
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef long long n, li, lj
    cdef double acc
    for r in range(m):
        n = 0
        acc = 0.0
        for i in range(d):
            n += a[r, i]
            li = a[r, i] + (d - 1 - i)
            acc -= lgamma(<double>(li + 1))
            for j in range(i + 1, d):
                lj = a[r, j] + (d - 1 - j)
                acc += log(<double>(li - lj))
        acc += lgamma(<double>(n + 1))
        o[r] = acc / LN2
    return out


cdef inline double _xlog2(double x) nogil:
    return x * log2(x) if x > 0.0 else 0.0


cdef inline double _div_term(double q, double p) nogil:
    if q <= 0.0:
        return 0.0
    if p <= 0.0:
        return INFINITY
    return q * (log2(q) - log2(p))


def grid_min_simplex(p, double rate, bint upper, double lo1, double hi1, Py_ssize_t m1,
                     double lo2=0.0, double hi2=0.0, Py_ssize_t m2=1):
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t d = pv.shape[0], i, j
    cdef double best = INFINITY, b1 = np.nan, b2 = np.nan
    cdef double s, t, u, h, dv, ds, dt
    if d != 2 and d != 3:
        raise ValueError("grid oracle supports d in {2, 3}")
    ds = (hi1 - lo1) / (m1 - 1) if m1 > 1 else 0.0
    dt = (hi2 - lo2) / (m2 - 1) if m2 > 1 else 0.0
    with nogil:
        for i in range(m1):
            s = lo1 + i * ds if i < m1 - 1 else hi1
            if s < 0.0 or s > 1.0:
                continue
            if d == 2:
                t = 1.0 - s
                h = -(_xlog2(s) + _xlog2(t))
                if (upper and h >= rate) or ((not upper) and h <= rate):
                    dv = _div_term(s, pv[0]) + _div_term(t, pv[1])
                    if dv < best:
                        best = dv
                        b1 = s
                        b2 = t
                continue
            for j in range(m2):
                t = lo2 + j * dt if j < m2 - 1 else hi2
                if t < 0.0 or t > 1.0:
                    continue
                u = 1.0 - s - t
                if u < -1e-15:
                    continue
                if u < 0.0:
                    u = 0.0
                h = -(_xlog2(s) + _xlog2(t) + _xlog2(u))
                if (upper and h >= rate) or ((not upper) and h <= rate):
                    dv = _div_term(s, pv[0]) + _div_term(t, pv[1]) + _div_term(u, pv[2])
                    if dv < best:
                        best = dv
                        b1 = s
                        b2 = t
    return best, b1, b2
