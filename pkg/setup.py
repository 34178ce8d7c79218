# -*- coding: utf-8 -*-
"""
Package setup.
"""

import setuptools

# Load content saved elsewhere needed in the setup.
with open("README.md", "r") as fh:
    long_description = fh.read()

with open("pybqe/VERSION", "r") as fh:
    version = fh.read().strip()

with open("requirements.txt", "r") as fh:
    requirements = fh.readlines()

setuptools.setup(
    name="pybqe",
    version=version,
    author="pyscoring",
    author_email="tadas.krisciunas@gmail.com",
    description="Blind quality enhancement of compressed dynamic point cloud attributes.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/pyscoring/pybqe",
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    package_data={"pybqe": ["VERSION"]},
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "pybqe=pybqe.cli:main"
        ]
    },
    classifiers=[
        "Programming Language :: Python :: 3"
    ],
    python_requires='>=3.8',
)
