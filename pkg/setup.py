"""Build the optional compiled engine; the package works without it."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("HEXSHELL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "hexshell._engine",
                    ["src/hexshell/_engine.pyx"],
                    include_dirs=["src/hexshell"],
                    depends=["src/hexshell/csrc/engine.hpp", "src/hexshell/csrc/bridge.hpp"],
                    language="c++",
                    extra_compile_args=["-O3", "-std=c++17"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:  # no Cython: pure-Python install
        ext_modules = []

setup(ext_modules=ext_modules)
