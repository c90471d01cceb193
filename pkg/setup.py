"""Build script: compiles the optional bag-matching extension.

The compiled kernel is a pure speedup; if Cython or a C++ toolchain is
missing the install still succeeds and the package falls back to the
pure-Python kernel at import time.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing: keep the install going
            warnings.warn(f"skipping compiled kernel ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name} ({exc}); pure-Python fallback will be used")


extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "triform._bagmatch",
                ["src/triform/_bagmatch.pyx"],
                language="c++",
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    warnings.warn("Cython not available; building without the compiled kernel")

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
