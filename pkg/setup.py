"""Build script: compiles the optional Cython kernel extension.

The package works without it (the numpy fallback is selected at
import); set KFREEWALK_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("KFREEWALK_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("kfreewalk.kernels._compiled",
                       ["src/kfreewalk/kernels/_compiled.pyx"],
                       extra_compile_args=["-O3"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
