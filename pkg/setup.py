"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time), so any build failure here is
non-fatal: we install pure-Python only.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "smccm._kernels._ext",
                ["src/smccm/_kernels/_ext.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # Cython or numpy missing: install without the extension
    print(f"smccm: skipping compiled kernels ({exc!r}); using pure-Python fallback")

setup(ext_modules=ext_modules)
