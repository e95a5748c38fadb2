from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("presheaf_cech._elim_fast",
                   ["src/presheaf_cech/_elim_fast.pyx"],
                   optional=True)],
        language_level=3,
    )

setup(ext_modules=ext_modules)
