"""Build hook for the optional compiled kernel extension.

The package is fully functional without the extension: dendrix.kernels
falls back to its NumPy reference implementation when the compiled module
is absent (see dendrix/kernels/__init__.py).
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext = Extension(
        "dendrix.kernels._core",
        ["src/dendrix/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    # A failed compile should degrade to the NumPy backend, not kill the install.
    ext.optional = True
    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
