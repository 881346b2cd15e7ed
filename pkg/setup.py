"""Build script for the optional compiled integrator core.

The package works without the extension (a pure-Python kernel is selected at
import time), so a missing compiler or Cython only costs speed, not features.
Set IMK_NO_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that degrades to the pure-Python fallback on any failure."""

    def run(self):
        try:
            super().run()
        except Exception as err:  # compiler missing, etc.
            print(f"warning: skipping compiled core ({err}); pure-Python kernel will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as err:
            print(f"warning: could not build {ext.name} ({err}); pure-Python kernel will be used")


ext_modules = []
if os.environ.get("IMK_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/imkit/_rk45.pyx"],
            language_level="3",
            compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
        )
    except ImportError:
        print("warning: Cython not available; pure-Python kernel will be used")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
