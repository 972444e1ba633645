"""Build script for the optional Cython tree kernel.

The package works without the extension: ``gemmperf.learn.tree`` falls back
to a pure numpy implementation that produces bit-identical trees.
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
                "gemmperf.learn._ctree",
                ["src/gemmperf/learn/_ctree.pyx"],
                # keep IEEE semantics identical to the numpy fallback
                extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )

setup(ext_modules=ext_modules)
