from setuptools import setup, find_packages
try:
    import pypandoc
    long_description = pypandoc.convert("README.md", "rst")
except:
    from io import open
    long_description = open("README.md").read()


setup(
    name = "phstair",
    description = "Exact laws, oracles and Monte Carlo checks for the Poisson hyperbolic staircase chain.",
    long_description = long_description,
    license = "BSD",
    version = "0.1.0",
    platforms = "Cross Platform",
    classifiers = [
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    packages = find_packages(exclude=["tests"]),
    python_requires = ">=3.9",
    install_requires = [
        "numpy>=1.17",
        "scipy>=1.12",
    ],
    entry_points = {
        "console_scripts": [
            "phstair = phstair.__main__:main",
        ],
    },
    test_suite = "tests",
)
