"""Build script: compiles the optional RK4 kernel extension.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time), so the extension is marked optional
and any build failure is non-fatal.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "msdsim._kernels",
                ["src/msdsim/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
