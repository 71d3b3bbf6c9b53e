import os

from setuptools import Extension, setup

# The compiled kernels are an optional speedup; the package falls back to
# pure Python (pap_lab._kernels_py) when the extension is absent.
ext_modules = []
if os.environ.get("PAP_LAB_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("pap_lab._kernels", ["src/pap_lab/_kernels.pyx"])],
            language_level="3",
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
