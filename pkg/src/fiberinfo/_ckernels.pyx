# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Bessel K0 and per-realization ensemble time sums.

Must stay numerically identical (to rounding) with ``_pykernels``.
"""
import numpy as np

from libc.math cimport exp, fabs, log, sqrt

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double PI = 3.14159265358979323846
cdef double EPS = 1e-16
cdef int MAXIT = 10000


cdef double _k0_series(double x) nogil:
    cdef double q = 0.25 * x * x
    cdef double term = 1.0
    cdef double harmonic = 0.0
    cdef double i0 = 1.0
    cdef double tail = 0.0
    cdef int k
    for k in range(1, 40):
        term *= q / (<double>k * k)
        harmonic += 1.0 / k
        i0 += term
        tail += term * harmonic
        if term * harmonic < EPS * tail:
            break
    return -(log(0.5 * x) + EULER_GAMMA) * i0 + tail


cdef double _k0_steed(double x) nogil:
    # Temme's CF2 via Steed's algorithm, order zero.
    cdef double b = 2.0 * (1.0 + x)
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double delh = d
    cdef double q1 = 0.0
    cdef double q2 = 1.0
    cdef double a1 = 0.25
    cdef double q = a1
    cdef double c = a1
    cdef double a = -a1
    cdef double s = 1.0 + q * delh
    cdef double qnew, dels
    cdef int i
    for i in range(2, MAXIT):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if fabs(dels / s) < EPS:
            break
    return sqrt(PI / (2.0 * x)) * exp(-x) / s


def k0(x):
    """Modified Bessel function K0 on a float array (x > 0, checked by caller)."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(arr)
    cdef double[::1] xv = arr.reshape(-1)
    cdef double[::1] ov = out.reshape(-1)
    cdef Py_ssize_t i, n = xv.shape[0]
    with nogil:
        for i in range(n):
            if xv[i] < 2.0:
                ov[i] = _k0_series(xv[i])
            else:
                ov[i] = _k0_steed(xv[i])
    return out


cdef inline double _f_mu(double mu) nogil:
    cdef double m2 = mu * mu
    cdef double num = 10206.0 + m2 * (21303.0 + m2 * (15399.0 + m2 * (4644.0 + m2 * 496.0)))
    cdef double d = 3.0 + m2
    cdef double e = 9.0 + 4.0 * m2
    return mu * num / (15.0 * d * d * d * e * e)


def ensemble_row_sums(mu):
    """Row sums of cubic(mu), mu*f(mu) and log sqrt(1+mu^2/3) for a 2-D array.

    Returns an array of shape (rows, 3).
    """
    arr = np.ascontiguousarray(mu, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("mu must be two-dimensional")
    out = np.zeros((arr.shape[0], 3), dtype=np.float64)
    cdef double[:, ::1] mv = arr
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t r, j, rows = mv.shape[0], cols = mv.shape[1]
    cdef double m, m2, s0, s1, s2
    with nogil:
        for r in range(rows):
            s0 = 0.0
            s1 = 0.0
            s2 = 0.0
            for j in range(cols):
                m = mv[r, j]
                m2 = m * m
                s0 += 4.0 * m2 * m / (15.0 * (3.0 + m2))
                s1 += m * _f_mu(m)
                s2 += 0.5 * log(1.0 + m2 / 3.0)
            ov[r, 0] = s0
            ov[r, 1] = s1
            ov[r, 2] = s2
    return out
