# Builds the optional compiled kernels.  The package falls back to the pure
# Python implementations in treewalks._kernels.pykernels when the extension
# is unavailable, so a plain `pip install .` on a machine without a C
# compiler still yields a working (slower) install.

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "treewalks._kernels._ckernels",
                sources=["src/treewalks/_kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
