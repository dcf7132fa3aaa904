# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, exp, fabs, INFINITY

cnp.import_array()

cdef double _BIG = 1e150
cdef double _LOG_BIG = log(1e150)


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double cabs(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline double complex conj(double complex z) nogil:
    return z.real - 1j * z.imag


def affine_recurrence(mul, add, u0):
    cdef double complex[::1] m = np.ascontiguousarray(mul, dtype=np.complex128)
    cdef double complex[::1] a = np.ascontiguousarray(add, dtype=np.complex128)
    cdef Py_ssize_t n = m.shape[0], i
    out_arr = np.empty(n + 1, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex u = u0
    out[0] = u
    with nogil:
        for i in range(n):
            u = m[i] * u + a[i]
            out[i + 1] = u
    return out_arr


cdef double _solve_adjoint(double complex dc, double complex[::1] sc,
                           double complex[::1] rhs, double complex[::1] z) nogil:
    cdef Py_ssize_t n = rhs.shape[0], i, j
    cdef double logscale = 0.0
    cdef double complex prev = rhs[0] / dc
    z[0] = prev
    for i in range(1, n):
        prev = (rhs[i] - sc[i - 1] * prev) / dc
        z[i] = prev
        if cabs(prev) > _BIG:
            for j in range(i + 1):
                z[j] = z[j] / _BIG
            prev = z[i]
            logscale += _LOG_BIG
    return logscale


cdef double _solve_upper(double complex d, double complex[::1] s,
                         double complex[::1] rhs, double complex[::1] y) nogil:
    cdef Py_ssize_t n = rhs.shape[0], i, j
    cdef double logscale = 0.0
    cdef double complex prev = rhs[n - 1] / d
    y[n - 1] = prev
    for i in range(n - 2, -1, -1):
        prev = (rhs[i] - s[i] * prev) / d
        y[i] = prev
        if cabs(prev) > _BIG:
            for j in range(i, n):
                y[j] = y[j] / _BIG
            prev = y[i]
            logscale += _LOG_BIG
    return logscale


cdef double _normalize(double complex[::1] v) nogil:
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += cabs2(v[i])
    acc = sqrt(acc)
    for i in range(n):
        v[i] = v[i] / acc
    return acc


def inverse_iteration(diag, sup, x0, double tol, long maxiter):
    cdef double complex d = diag
    cdef double complex dc = conj(d)
    cdef double complex[::1] s = np.ascontiguousarray(sup, dtype=np.complex128)
    sc_arr = np.conj(np.asarray(s))
    cdef double complex[::1] sc = sc_arr
    xa = np.array(x0, dtype=np.complex128)
    ya = np.zeros_like(xa)
    za = np.zeros_like(xa)
    cdef double complex[::1] x = xa
    cdef double complex[::1] y = ya
    cdef double complex[::1] z = za
    cdef double complex[::1] tmp
    cdef Py_ssize_t n = x.shape[0], i
    cdef double prev = INFINITY, sigma = INFINITY
    cdef double log1, log2, n1, n2, dot, log_theta
    cdef double complex acc
    cdef long it = 0
    cdef bint converged = False
    with nogil:
        _normalize(x)
        while it < maxiter:
            it += 1
            log1 = _solve_adjoint(dc, sc, x, z)
            n1 = _normalize(z)
            log2 = _solve_upper(d, s, z, y)
            n2 = _normalize(y)
            acc = 0
            for i in range(n):
                acc = acc + conj(x[i]) * y[i]
            dot = cabs(acc)
            if dot == 0.0:
                dot = 1e-300
            log_theta = log1 + log(n1) + log2 + log(n2) + log(dot)
            sigma = exp(-0.5 * log_theta)
            tmp = x
            x = y
            y = tmp
            if fabs(sigma - prev) <= tol * sigma:
                converged = True
                break
            prev = sigma
    return sigma, np.asarray(x).copy(), it, converged
