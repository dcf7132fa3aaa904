from setuptools import setup, Extension

# The compiled core is optional: without Cython/numpy headers the package
# installs pure-Python and mswso.kernels falls back at import time.
try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "mswso._kernels",
                ["src/mswso/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3", "embedsignature": True},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
