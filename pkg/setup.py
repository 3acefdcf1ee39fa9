import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# The Monte-Carlo kernels are optional at runtime (layercast.galois falls back
# to a vectorised NumPy implementation) but are built by default because the
# simulation workloads are two orders of magnitude faster compiled.
extensions = [
    Extension(
        "layercast.galois._mc_kernels",
        ["src/layercast/galois/_mc_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
