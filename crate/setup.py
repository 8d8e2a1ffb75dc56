"""Builds the native extension with cargo; setuptools only packages it.

The extension is abi3, so one build serves every supported CPython. pip must
run with --no-build-isolation so the sandbox's setuptools is reused.
"""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CargoExtension(Extension):
    def __init__(self, name: str, crate: str):
        super().__init__(name, sources=[])
        self.crate = crate


class cargo_build_ext(build_ext):
    def get_ext_filename(self, fullname: str) -> str:
        # abi3 module: no interpreter tag in the filename.
        return str(Path(*fullname.split("."))) + ".abi3.so"

    def build_extension(self, ext: CargoExtension) -> None:
        root = Path(__file__).parent.resolve()
        subprocess.run(
            ["cargo", "build", "--release", "-p", ext.crate],
            cwd=root,
            check=True,
        )
        built = root / "target" / "release" / "lib_native.so"
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built, dest)


setup(
    ext_modules=[CargoExtension("mdd._native", crate="mdd-py")],
    cmdclass={"build_ext": cargo_build_ext},
)
