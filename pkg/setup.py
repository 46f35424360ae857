import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [Extension("dualmink._kernels", ["src/dualmink/_kernels.pyx"],
                   include_dirs=[numpy.get_include()], extra_compile_args=["-O3"],
                   optional=True)],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
