# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_fallback`` for the reference)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, copysign

cnp.import_array()


cdef inline double cabs2(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


def jacobi_sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                  double thresh, int max_sweeps):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double off, m, mag, theta, t, c, s
    cdef double complex apq, e, ec, xp, xq
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                m = cabs2(a[p, q])
                if m > off:
                    off = m
        if off <= thresh:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = cabs2(apq)
                if mag <= thresh:
                    continue
                e = (apq / mag).conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if theta == 0.0:
                    t = 1.0
                elif fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ec = e.conjugate()
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp - s * e * xq
                    a[k, q] = s * xp + c * e * xq
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - s * ec * xq
                    a[q, k] = s * xp + c * ec * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = c * xp - s * e * xq
                    v[k, q] = s * xp + c * e * xq
    return -1


def accumulate_payoffs(double[::1] cdf, double[:, ::1] payoffs, double[::1] draws):
    cdef Py_ssize_t k = cdf.shape[0]
    cdef Py_ssize_t g = payoffs.shape[0]
    cdef Py_ssize_t N = draws.shape[0]
    cdef Py_ssize_t i, j, o
    cdef double u
    out_arr = np.empty(N, dtype=np.int64)
    tot_arr = np.zeros(g, dtype=np.float64)
    cdef cnp.int64_t[::1] outcomes = out_arr
    cdef double[::1] totals = tot_arr
    for i in range(N):
        u = draws[i]
        o = 0
        while o < k - 1 and u >= cdf[o]:
            o += 1
        outcomes[i] = o
        for j in range(g):
            totals[j] += payoffs[j, o]
    return out_arr, tot_arr
