"""Build script for the compiled episode kernels.

The extension links against numpy's bundled npyrandom library so the hot
loops can call the same C binomial sampler the Generator API uses. If the
toolchain is unavailable the build degrades to the pure-Python kernels
(selected automatically at import time).
"""
import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the accelerator if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or header missing
            print(f"WARNING: compiled kernels skipped ({exc}); "
                  "using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: could not build {ext.name} ({exc}); "
                  "using pure-Python fallback")


ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    randlib = os.path.join(os.path.dirname(np.random.__file__), "lib")
    ext_modules = cythonize(
        [
            Extension(
                "coneperc.sim._cycore",
                ["src/coneperc/sim/_cycore.pyx"],
                include_dirs=[np.get_include()],
                library_dirs=[randlib],
                libraries=["npyrandom"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError as exc:
    print(f"WARNING: {exc}; building without compiled kernels")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
