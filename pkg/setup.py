"""Build hook for the optional compiled kernel.

The package is pure Python plus one Cython extension for the quadrature hot
loop.  If Cython or a C compiler is unavailable (or RMTLAB_NO_EXT is set),
installation proceeds without it and the numpy backend is used at runtime.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RMTLAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
        ext_modules = cythonize(
            ["src/rmtlab/_kernels/_accum.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
