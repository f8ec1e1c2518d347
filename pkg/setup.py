"""Build script for the optional compiled kernel extension.

The package works without the extension; covermech._kernels falls back to
the pure-Python implementation when the compiled module is absent.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("covermech._kernels._fast", ["src/covermech/_kernels/_fast.pyx"])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
