import pathlib
import setuptools
from setuptools import setup, find_packages

# The directory containing this file
LOCAL_PATH = pathlib.Path(__file__).parent

# The text of the README file
README_FILE = (LOCAL_PATH / "README.md").read_text()

# Load requirements, so they are listed in a single place
with open("requirements.txt") as fp:
    install_requires = [dep.strip() for dep in fp.readlines() if dep.strip()]

# This call to setup() does all the work
setup(
    author="foldsurf developers",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    description="Fold-transversal S gate circuits, detectors and decoders for rotated surface codes",
    entry_points={"console_scripts": ["foldsurf=foldsurf.__main__:main"]},
    include_package_data=True,
    install_requires=install_requires,
    keywords=["surface code", "quantum error correction", "decoding", "fold-transversal"],
    license="MIT",
    long_description_content_type="text/markdown",
    long_description=README_FILE,
    name="foldsurf",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.8",
    test_suite="tests",
    tests_require=[],
    version="0.1.0",  # remember to sync with __init__.py
    zip_safe=False,
)
