"""Build the optional compiled kernels.

The Cython extension is marked optional: if compilation fails the package
still installs and ``entconc._core`` falls back to the NumPy kernels.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without Cython
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "entconc._kernels",
                ["src/entconc/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
