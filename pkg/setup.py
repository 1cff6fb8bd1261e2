from setuptools import setup, find_packages

setup(
    name="sandpile-parking",
    version="0.1",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["sandpile_app"],
    install_requires=[
        "pyyaml>=6.0.1",
        "pytest>=7.4.3",
        "sympy>=1.12",
        "networkx>=3.1",
    ],
    entry_points={
        "console_scripts": ["sandpile=engine.engine_core:main"],
    },
)
