"""Build script for the compiled fitness kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so the build degrades gracefully when Cython or a
C compiler is unavailable.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "wolfnet._kernels._core",
                sources=["src/wolfnet/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
