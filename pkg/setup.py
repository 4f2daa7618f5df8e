"""Build script: compiles the optional convolution kernel extension.

The package is fully functional without the extension (numpy fallback in
folijet.kernels); pip builds it when Cython and a C compiler are present.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "folijet._kernels",
                ["src/folijet/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"folijet: skipping compiled kernels ({exc}); using numpy fallback\n")

setup(ext_modules=ext_modules)
