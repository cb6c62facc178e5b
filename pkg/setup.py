from setuptools import Extension, setup

# The simulation kernel is compiled from Cython when available; the package
# falls back to the pure-Python kernel at import time if the extension is
# missing, so a failed/absent compile is not fatal.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "aoi_harq._kernel",
                ["src/aoi_harq/_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
