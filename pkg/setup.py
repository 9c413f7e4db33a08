#!/usr/bin/env python3
"""
Setup script for qwdirac
"""

from setuptools import setup, find_packages

# Read README for long description
def read_readme():
    try:
        with open("README.md", "r", encoding="utf-8") as f:
            return f.read()
    except FileNotFoundError:
        return "qwdirac - quantum walks and cutoff Dirac pseudovelocity laws"

# Read requirements
def read_requirements():
    try:
        with open("requirements.txt", "r", encoding="utf-8") as f:
            lines = [line.strip() for line in f if line.strip() and not line.startswith("#")]
    except FileNotFoundError:
        lines = [
            "click>=8.0.0",
            "pydantic>=2.9.0",
            "loguru>=0.7.0",
            "numpy>=1.24.0",
            "pandas>=2.0.0",
            "scipy>=1.10.0",
        ]
    return [line for line in lines if not line.startswith(("pytest", "black", "isort", "mypy"))]

setup(
    name="qwdirac",
    version="1.0.0",
    description="Simple quantum walks, the cutoff Dirac equation and their limiting pseudovelocity laws",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests", "examples")),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.9",
    install_requires=read_requirements(),
    extras_require={
        "dev": ["pytest>=7.0.0", "black>=23.0.0", "isort>=5.12.0", "mypy>=1.0.0"],
    },
    entry_points={
        "console_scripts": [
            "qwdirac=qwdirac.cli:main",
        ],
    },
    include_package_data=True,
    zip_safe=False,
    keywords="quantum walk dirac equation limit law pseudovelocity quadrature",
)
