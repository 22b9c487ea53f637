"""Build script for the optional compiled RK4 kernel.

The package works without the extension (a pure-Python kernel is selected at
import).  Set GKLS_NO_EXT=1 to skip compiling it.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("GKLS_NO_EXT", "") in ("", "0"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "gkls._kernels",
                    ["src/gkls/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
