"""Build script for the optional compiled propagation kernel.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time); build with

    pip install -e . --no-build-isolation
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "fermibos._kernels._prop",
                ["src/fermibos/_kernels/_prop.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
