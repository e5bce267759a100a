"""Build the optional compiled kernels.

The package works without the extension (a NumPy fallback is selected at
import time), so any build failure here downgrades to a warning instead of
aborting the install.  Set HAMLB_SKIP_EXT=1 to skip the extension entirely.
"""

import os
import sys

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HAMLB_SKIP_EXT", "0") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "hamlb._kernels",
                    sources=["src/hamlb/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        sys.stderr.write(f"warning: compiled kernels disabled ({exc})\n")
        ext_modules = []

setup(ext_modules=ext_modules)
