"""Build glue for the optional compiled kernels.

The package is pure Python plus one Cython extension holding the miner hot
loops.  The extension is a speedup, not a requirement: if Cython or a C
compiler is missing the build degrades to the pure-Python kernels with a
warning instead of failing.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that treats compilation failure as a soft error."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: compiled kernels skipped ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); using pure-Python fallback")


def extensions():
    if os.environ.get("LOGQUERY_SKIP_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "logquery._kernels._speedups",
        sources=["src/logquery/_kernels/_speedups.pyx"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
