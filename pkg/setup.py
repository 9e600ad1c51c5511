import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the accelerator extension, but fall back to pure Python on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, etc.
            print(f"warning: skipping C extension build ({exc}); "
                  f"using pure-Python bitmap kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); "
                  f"using pure-Python bitmap kernels")


def extensions():
    if os.environ.get("RACEREPLAY_NO_EXT") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "racereplay._kernels.bitmap_ext",
                ["src/racereplay/_kernels/bitmap_ext.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
