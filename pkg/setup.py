from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "becert._kernels",
                ["src/becert/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython available: install pure-Python only, the backend selector
    # falls back to becert._kernels_py at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
