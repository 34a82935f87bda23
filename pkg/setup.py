#!/usr/bin/python3
# coding: utf-8
from setuptools import setup

VERSION = "1.0.0"

with open("README.md", "r") as fh:
    long_description = fh.read()


setup(
    name="pydybm",
    version=VERSION,
    description="Online time-series learning with dynamic Boltzmann machines.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="Apache",
    packages=[
        "pydybm",
        "pydybm.models",
        "pydybm.optimizers",
        "pydybm.experiment",
        "pydybm.cli",
        "pydybm.utils",
    ],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Developers",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Software Development :: Libraries :: Python Modules",
    ],
    include_package_data=True,
    python_requires=">=3.7",
    install_requires=["numpy>=1.20", "PyYAML>=5.3.1"],
    entry_points={"console_scripts": ["pydybm = pydybm.cli.dybm_cli:main"]},
    extras_require={
        "dev": ["black", "wheel", "pytest"],
        "doc": ["autoapi", "sphinx_rtd_theme", "sphinx-autodoc-typehints"],
    },  # Optional
)
