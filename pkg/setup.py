import numpy as np
from setuptools import Extension, setup

# The compiled kernel is optional: ncgeom.evaluate falls back to the pure
# numpy kernel when the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ncgeom._evalcore",
                ["src/ncgeom/_evalcore.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
