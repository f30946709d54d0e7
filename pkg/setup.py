from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("shotvod.kernels._native", ["src/shotvod/kernels/_native.pyx"])],
        language_level=3,
    )
except ImportError:
    # pure-Python fallback kernels are used when the extension is absent
    ext_modules = []

setup(ext_modules=ext_modules)
