import warnings

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("stratfix._kernel", ["src/stratfix/_kernel.pyx"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
        },
    )
except Exception as exc:
    # The compiled kernel is an optimization; the package runs on the
    # pure-Python twin when it cannot be built.
    warnings.warn(f"building stratfix without the compiled kernel: {exc}")

setup(ext_modules=ext_modules)
