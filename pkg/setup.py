"""Build script for the optional compiled estimator kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compilation only costs speed, not functionality.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "rssmpl._mpl_kernel",
                ["src/rssmpl/_mpl_kernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
