"""Build the optional compiled kernel extension.

Run with:
    pip install -e . --no-build-isolation
The package still imports without the extension; it then falls back to the
NumPy kernels.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "switchsynth._kernels._ckernels",
                ["src/switchsynth/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3", "embedsignature": True},
    )

setup(ext_modules=ext_modules)
