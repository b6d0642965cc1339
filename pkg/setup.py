"""Build script: compiles the hot-loop kernels as a C extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile is downgraded to a warning.
"""

import sys

from setuptools import setup

try:
    from setuptools import Extension
    from Cython.Build import cythonize
    import numpy as np

    ext = Extension(
        "diffcodes._kernels._core",
        ["src/diffcodes/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except Exception as exc:  # pragma: no cover
    print(f"warning: kernel extension not built ({exc}); "
          "pure-Python fallback will be used", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
