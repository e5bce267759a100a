"""Hard instances for Hamiltonian learning, certified numerically.

Submodules are imported lazily so that the HAMLB_THREADS translation below
takes effect before numpy (and its BLAS) loads.
"""

import importlib
import os

# HAMLB_THREADS caps the BLAS pools; explicit per-library settings win.
if "HAMLB_THREADS" in os.environ:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, os.environ["HAMLB_THREADS"])

__version__ = "0.1.0"

_SUBMODULES = (
    "kernels",
    "pauli_core",
    "fourier",
    "combinatorics",
    "dense_linalg",
    "worst_case",
    "local_case",
    "game_sim",
    "cli",
)

__all__ = ["__version__", *_SUBMODULES]


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
