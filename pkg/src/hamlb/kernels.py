"""Kernel backend selection.

The compiled extension (``hamlb._kernels``) is preferred when importable;
otherwise the NumPy reference implementation is used.  Set
``HAMLB_PURE_PYTHON=1`` to force the fallback, e.g. for benchmarking or to
rule the extension out when debugging.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py as python_backend

compiled_backend = None
if os.environ.get("HAMLB_PURE_PYTHON", "0") != "1":
    try:
        from . import _kernels as compiled_backend  # type: ignore[no-redef]
    except ImportError:
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend

HAVE_COMPILED = compiled_backend is not None


def backend_name() -> str:
    return "compiled" if _impl is compiled_backend else "python"


class JacobiConvergenceError(RuntimeError):
    """Raised when the cyclic Jacobi sweep limit is hit before convergence."""


def fwht_inplace(a: np.ndarray) -> None:
    """In-place unnormalized Walsh-Hadamard transform of a float64 array."""
    _impl.fwht_inplace(a)


def jacobi_eigh(A: np.ndarray, tol: float = 1e-13, max_sweeps: int = 64):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with eigenvalues ascending and ``A = V diag(w) V^dag``.
    """
    w, V, sweeps, converged = _impl.jacobi_eigh(A, tol, max_sweeps)
    if not converged:
        raise JacobiConvergenceError(
            f"jacobi sweep limit reached (max_sweeps={max_sweeps}, dim={A.shape[0]})"
        )
    return w, V
