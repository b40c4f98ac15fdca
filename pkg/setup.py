import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

compiler_directives = {
    "boundscheck": False,
    "wraparound": False,
    "cdivision": True,
    "language_level": "3",
}

ext_modules = [
    Extension(
        "zeroswap._ckernels",
        ["src/zeroswap/_ckernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

setup(ext_modules=cythonize(ext_modules, compiler_directives=compiler_directives))
