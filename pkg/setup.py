import sys

import numpy as np
from setuptools import setup

# The compiled kernels are an optional speedup: the package falls back to the
# pure-numpy implementation when the extension is missing, so a failed build
# must not block installation.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/pinnfem/kernels/_fast.pyx"],
        language_level="3",
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs.append(np.get_include())
        ext.extra_compile_args = ["-O3"]
        ext.define_macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]
except Exception as exc:  # pragma: no cover
    print(f"warning: building without compiled kernels ({exc})", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
