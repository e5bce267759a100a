# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels: Walsh-Hadamard butterfly and cyclic Jacobi.

Same rotation sequence and stopping rule as ``hamlb._kernels_py``; the two
backends are interchangeable.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def fwht_inplace(cnp.float64_t[::1] a not None):
    """Unnormalized Walsh-Hadamard butterfly, in place on a length-2^n array."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double x, y
    if m & (m - 1):
        raise ValueError(f"length must be a power of two, got {m}")
    while h < m:
        for i in range(0, m, 2 * h):
            for j in range(i, i + h):
                x = a[j]
                y = a[j + h]
                a[j] = x + y
                a[j + h] = x - y
        h <<= 1


def jacobi_eigh(A, double tol=1e-13, int max_sweeps=64):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns ``(w, V, sweeps, converged)``; see the fallback backend for the
    contract.
    """
    cdef cnp.complex128_t[:, ::1] a = np.array(A, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t d = a.shape[0]
    V_arr = np.eye(d, dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] v = V_arr
    cdef Py_ssize_t p, q, i, sweep
    cdef double anorm, off, r, tau, t, c, s, app, aqq
    cdef double complex apq, phase, sp, spc, xp, xq
    cdef int converged = 0
    cdef int sweeps = 0

    anorm = 0.0
    for p in range(d):
        for q in range(d):
            anorm += (a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag)
    anorm = sqrt(anorm)
    if anorm == 0.0 or d == 1:
        w = np.asarray(a).diagonal().real.copy()
        return w, V_arr, 0, True

    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(d):
            for q in range(d):
                if p != q:
                    off += (a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag)
        off = sqrt(off)
        if off <= tol * anorm:
            converged = 1
            break
        sweeps = sweep + 1
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r <= 1e-18 * anorm:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = -1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                spc = sp.conjugate()
                # A <- R^dag A R; columns then rows, then exact zeros
                for i in range(d):
                    xp = a[i, p]
                    xq = a[i, q]
                    a[i, p] = c * xp + spc * xq
                    a[i, q] = -sp * xp + c * xq
                for i in range(d):
                    xp = a[p, i]
                    xq = a[q, i]
                    a[p, i] = c * xp + sp * xq
                    a[q, i] = -spc * xp + c * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for i in range(d):
                    xp = v[i, p]
                    xq = v[i, q]
                    v[i, p] = c * xp + spc * xq
                    v[i, q] = -sp * xp + c * xq

    w = np.asarray(a).diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(V_arr[:, order]), sweeps, bool(converged)
