"""NumPy reference implementations of the numerical kernels.

These are the fallback versions of the two hot loops (Walsh-Hadamard
butterfly and cyclic Jacobi diagonalization).  ``hamlb._kernels`` contains
the compiled equivalents; ``hamlb.kernels`` picks one at import time.  Both
backends implement the same rotation sequence, so results agree to rounding.
"""

from __future__ import annotations

import numpy as np


def fwht_inplace(a: np.ndarray) -> None:
    """Unnormalized Walsh-Hadamard butterfly, in place on a length-2^n array."""
    m = a.size
    if m & (m - 1):
        raise ValueError(f"length must be a power of two, got {m}")
    h = 1
    while h < m:
        v = a.reshape(-1, 2, h)
        x = v[:, 0, :].copy()
        y = v[:, 1, :]
        np.add(x, y, out=v[:, 0, :])
        np.subtract(x, y, out=v[:, 1, :])
        h <<= 1


def jacobi_eigh(A: np.ndarray, tol: float = 1e-13, max_sweeps: int = 64):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns ``(w, V, sweeps, converged)`` with eigenvalues ``w`` ascending and
    unitary ``V`` such that ``A = V diag(w) V^dag``.  Convergence criterion:
    off-diagonal Frobenius mass <= tol * ||A||_F.
    """
    A = np.array(A, dtype=np.complex128, copy=True)
    d = A.shape[0]
    V = np.eye(d, dtype=np.complex128)
    anorm = np.linalg.norm(A, "fro")
    if anorm == 0.0 or d == 1:
        w = np.diag(A).real.copy()
        return w, V, 0, True
    converged = False
    sweeps = 0
    for sweep in range(max_sweeps):
        # off-diagonal mass must be computed directly: subtracting two large
        # sums cancels catastrophically and stalls the stopping rule
        mask_off = A.copy()
        np.fill_diagonal(mask_off, 0.0)
        off = np.linalg.norm(mask_off, "fro")
        if off <= tol * anorm:
            converged = True
            break
        sweeps = sweep + 1
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                r = abs(apq)
                if r <= 1e-18 * anorm:
                    continue
                phase = apq / r
                tau = (A[q, q].real - A[p, p].real) / (2.0 * r)
                t = (-1.0 if tau >= 0.0 else 1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sp = (t * c) * phase
                spc = np.conj(sp)
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp + spc * colq
                A[:, q] = -sp * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp + sp * rowq
                A[q, :] = -spc * rowp + c * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                colp = V[:, p].copy()
                colq = V[:, q].copy()
                V[:, p] = c * colp + spc * colq
                V[:, q] = -sp * colp + c * colq
    else:
        converged = False
    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(V[:, order]), sweeps, converged
