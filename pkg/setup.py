#!/usr/bin/env python
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages

setup(
    name="edge_model_cache",
    version="0.1.0",
    packages=find_packages(exclude=["examples", "examples.*"]),
    python_requires=">=3.11",
    install_requires=[
        "numpy",
        "pydantic>=2",
        "python-dotenv",
        "rich",
        "typer",
    ],
    entry_points={
        "console_scripts": [
            "simrun=edge_model_cache.cli.main:main",
        ],
    },
)
