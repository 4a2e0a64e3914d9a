"""Build script: compiles the optional projection kernels.

The package works without the compiled extension (a numpy fallback is
selected at import time), so any compilation failure downgrades to a
pure-Python install instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/missingpath/projection/_kernels.pyx",
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"skipping compiled kernels ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
