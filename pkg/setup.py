"""
Modified Newman-Watts Small World
Setup configuration for Python package
"""

from setuptools import find_namespace_packages, setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="modified-nw-smallworld",
    version="0.3.0",
    author="Small World Team",
    description="Modified Newman-Watts small world on the torus: diameter, mixing time and isoperimetry",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_namespace_packages(include=["backend", "backend.*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.1.0",
        "scikit-learn>=1.3.0",
        "joblib>=1.3.0",
        "click>=8.1.0",
        "tqdm>=4.66.0",
        "pydantic>=2.5.0",
        "pydantic-settings>=2.1.0",
        "python-dotenv>=1.0.0",
        "pyyaml>=6.0",
        "python-json-logger>=2.0.0",
        "tomli>=2.0.0; python_version < '3.11'",
        "fastapi>=0.104.0",
        "uvicorn>=0.24.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "pytest-cov>=4.1.0",
            "httpx>=0.25.0",
            "networkx>=3.1",
            "black>=23.10.0",
            "mypy>=1.6.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "mnw=backend.src.api.cli:main",
            "mnw-api=backend.src.api.main:main",
        ],
    },
)
