"""Build the optional compiled kernel extension.

If Cython or a C compiler is missing the package still installs and falls
back to the numpy kernels.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("ftforge._kernels", ["src/ftforge/_kernels.pyx"],
                   include_dirs=[np.get_include()],
                   extra_compile_args=["-O3"],
                   define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
