"""Setup for memoplan-py."""
from setuptools import setup, Command
import os
import re

# Extract version number
verfile = open("memoplan/_version.py", "rt").read()
match = re.search(r"^__version__ = '(\d\.\d.\d+(\.\d+)?)'",
                  verfile, re.MULTILINE)
if match:
    version = match.group(1)
else:
    raise RuntimeError("Unable to find version string")


class ShellCommand(Command):
    """Class with defaults for adding extra shell commands from setup."""

    user_options = []

    def initialize_options(self):
        """Empty initialize_options."""
        pass

    def finalize_options(self):
        """Empty finalize_options."""
        pass


class Coverage(ShellCommand):
    """Class to allow coverage run from setup."""

    description = "run coverage"

    def run(self):
        """Run coverage program."""
        os.system("coverage run --source=memoplan setup.py test")
        os.system("coverage report")
        os.system("coverage html")
        print("See htmlcov/index.html for details.")


class Demos(ShellCommand):
    """Class to rebuild the demo documentation from setup."""

    description = "rebuild docs/demo_*.md from the demo tests"

    def run(self):
        """Run build_demo_docs.sh."""
        os.system("./build_demo_docs.sh")


setup(
    name='memoplan-py',
    version=version,
    packages=['memoplan'],
    package_data={'memoplan': ['data/*']},
    scripts=['memoplan-tool.py'],
    classifiers=["Development Status :: 2 - Pre-Alpha",
                 "Intended Audience :: Developers",
                 "Intended Audience :: Science/Research",
                 "Operating System :: OS Independent",
                 "Programming Language :: Python",
                 "Programming Language :: Python :: 3.6",
                 "Programming Language :: Python :: 3.7",
                 "Programming Language :: Python :: 3.8",
                 "Topic :: Software Development :: Compilers",
                 "Topic :: Software Development :: "
                 "Libraries :: Python Modules"],
    description='memoplan-py - Static memory planning for neural network inference traces',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    python_requires='>=3.6',
    install_requires=[
        'numpy>=1.17',
        'networkx>=2.4',
        'matplotlib>=3.1'
    ],
    test_suite="tests",
    cmdclass={
        'coverage': Coverage,
        'demos': Demos
    },
)
