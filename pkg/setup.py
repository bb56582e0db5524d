from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the compiled tick loop must produce bit-identical doubles
# to the pure-Python engine, so FMA contraction has to stay disabled.
extensions = [
    Extension(
        "microel._kernel",
        ["src/microel/_kernel.pyx"],
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
