import distutils.log
import os
import subprocess
from pathlib import Path

# noinspection Mypy
from setuptools import Command, setup

# The directory containing this file
HERE = Path(__file__).parent

# The text of the README file
README = (HERE / "README.md").read_text()

PACKAGES = ["birkhoff_fss", "fss_tools", "fss_tools.commands"]


def run_cmd(cmd, reporter) -> None:
    """Run arbitrary command as subprocess"""
    reporter("Run command: {}".format(str(cmd)), level=distutils.log.DEBUG)
    try:
        subprocess.check_call(cmd)
    except subprocess.CalledProcessError as ex:
        reporter(str(ex), level=distutils.log.ERROR)


# noinspection PyAttributeOutsideInit
class ToolCmd(Command):
    """Run a code-quality tool on a list of directories"""

    tool = ""
    default_dirs = ["birkhoff_fss", "fss_tools"]
    user_options = [("dirs=", None, "Directories to process")]

    def initialize_options(self) -> None:
        self.dirs = list(self.default_dirs)

    def finalize_options(self):
        if isinstance(self.dirs, str):
            self.dirs = self.dirs.split(",")
        for d in self.dirs:
            assert os.path.exists(d), "Path {} does not exist.".format(d)

    def extra_args(self):
        return []

    def run(self):
        run_cmd([self.tool, *self.extra_args(), *self.dirs], self.announce)


class MypyCmd(ToolCmd):
    description = "run mypy on the library and the CLI"
    tool = "mypy"
    user_options = ToolCmd.user_options + [("types", None, "Install missing type stubs")]

    def initialize_options(self) -> None:
        super().initialize_options()
        self.types = False

    def extra_args(self):
        return ["--install-types"] if self.types else []


class Black(ToolCmd):
    description = "format code with black"
    tool = "black"
    default_dirs = ["."]


class Isort(ToolCmd):
    description = "sort imports with isort"
    tool = "isort"
    default_dirs = ["."]


setup(
    name="birkhoff-fss",
    description="Birkhoff-type fundamental systems of solutions for ODEs with a spectral parameter",
    long_description=README,
    long_description_content_type="text/markdown",
    license="Apache-2.0",
    include_package_data=True,
    python_requires=">=3.8, <4",
    install_requires=["numpy>=1.20", "pyyaml", "scipy>=1.6", "typer"],
    tests_require=["pytest-runner", "pytest", "mypy"],
    cmdclass={"mypy": MypyCmd, "black": Black, "isort": Isort},
    classifiers=[
        "License :: OSI Approved :: Apache Software License",
    ],
    entry_points={
        "console_scripts": [
            "fss_ctl = fss_tools.cli:run",
        ],
    },
    packages=PACKAGES,
    package_dir={pkg: os.path.join(*pkg.split(".")) for pkg in PACKAGES},
)
