"""Pure-Python reference kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is unavailable or ``MSWSO_PURE_PYTHON`` is set.
"""
import math

import numpy as np

_BIG = 1e150
_LOG_BIG = math.log(_BIG)


def affine_recurrence(mul, add, u0):
    """Run ``u[i+1] = mul[i] * u[i] + add[i]`` from ``u[0] = u0``.

    Returns a complex array of length ``len(mul) + 1``.
    """
    mul = np.asarray(mul, dtype=np.complex128)
    add = np.asarray(add, dtype=np.complex128)
    n = mul.shape[0]
    out = np.empty(n + 1, dtype=np.complex128)
    u = complex(u0)
    out[0] = u
    m = mul.tolist()
    a = add.tolist()
    for i in range(n):
        u = m[i] * u + a[i]
        out[i + 1] = u
    return out


def _solve_adjoint(dc, sc, rhs, z):
    # M^H z = rhs; M^H is lower bidiagonal with diagonal conj(d), subdiagonal conj(sup)
    n = len(rhs)
    logscale = 0.0
    prev = rhs[0] / dc
    z[0] = prev
    for i in range(1, n):
        prev = (rhs[i] - sc[i - 1] * prev) / dc
        z[i] = prev
        if abs(prev) > _BIG:
            for j in range(i + 1):
                z[j] /= _BIG
            prev = z[i]
            logscale += _LOG_BIG
    return logscale


def _solve_upper(d, s, rhs, y):
    # M y = rhs; M upper bidiagonal with diagonal d, superdiagonal sup
    n = len(rhs)
    logscale = 0.0
    prev = rhs[n - 1] / d
    y[n - 1] = prev
    for i in range(n - 2, -1, -1):
        prev = (rhs[i] - s[i] * prev) / d
        y[i] = prev
        if abs(prev) > _BIG:
            for j in range(i, n):
                y[j] /= _BIG
            prev = y[i]
            logscale += _LOG_BIG
    return logscale


def _normalize(v):
    nrm = math.sqrt(sum(c.real * c.real + c.imag * c.imag for c in v))
    for i in range(len(v)):
        v[i] /= nrm
    return nrm


def inverse_iteration(diag, sup, x0, tol, maxiter):
    """Smallest singular value of the upper-bidiagonal matrix ``M``.

    ``M`` has constant diagonal ``diag`` and superdiagonal ``sup``.  Inverse
    power iteration is run on ``M^H M``, each step being one lower and one
    upper bidiagonal solve.  Partial solutions are rescaled to avoid
    overflow, so singular values far below ``1e-300`` underflow to zero
    rather than breaking the iteration.

    Returns ``(sigma, vector, iterations, converged)``.
    """
    d = complex(diag)
    dc = d.conjugate()
    s = [complex(c) for c in np.asarray(sup, dtype=np.complex128)]
    sc = [c.conjugate() for c in s]
    x = [complex(c) for c in np.asarray(x0, dtype=np.complex128)]
    n = len(x)
    _normalize(x)
    z = [0j] * n
    y = [0j] * n
    prev = math.inf
    sigma = math.inf
    it = 0
    converged = False
    while it < maxiter:
        it += 1
        log1 = _solve_adjoint(dc, sc, x, z)
        n1 = _normalize(z)
        log2 = _solve_upper(d, s, z, y)
        n2 = _normalize(y)
        dot = abs(sum(xi.conjugate() * yi for xi, yi in zip(x, y)))
        if dot == 0.0:
            dot = 1e-300
        log_theta = log1 + math.log(n1) + log2 + math.log(n2) + math.log(dot)
        sigma = math.exp(-0.5 * log_theta)
        x, y = y, x
        if abs(sigma - prev) <= tol * sigma:
            converged = True
            break
        prev = sigma
    return sigma, np.array(x, dtype=np.complex128), it, converged
