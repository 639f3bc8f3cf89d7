"""Build script: compiles the optional Cython orbit kernels.

The package works without the extension (a vectorized numpy fallback is
selected at import time), so any failure here degrades to a pure build
instead of aborting the install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/tanatlas/_kernels.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # no Cython or no compiler: pure-python install
    print(f"tanatlas: skipping compiled kernels ({exc!r})")

setup(ext_modules=ext_modules)
