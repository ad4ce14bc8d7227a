import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "polhawk._kernels._core",
                ["src/polhawk/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # no Cython: ship pure python, the package falls back at import time
    extensions = []

setup(ext_modules=extensions)
