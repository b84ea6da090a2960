"""Build the optional Cython enumeration kernel.

If Cython or a C compiler is missing the package still installs; the
pure-Python kernel is selected at import time instead.
"""
import os

from setuptools import setup
from setuptools.command.build_ext import build_ext

DIRECTIVES = dict(
    language_level=3,
    boundscheck=False,
    wraparound=False,
    cdivision=True,
    embedsignature=True,
)


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or Cython missing
            print(f"warning: compiled kernel not built ({exc}); using pure Python")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); using pure Python")


def extensions():
    if os.environ.get("BPREDUCE_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "bpreduce._kernels",
        ["src/bpreduce/_kernels.pyx"],
        include_dirs=["src/bpreduce"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives=DIRECTIVES)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
