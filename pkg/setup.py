import os

from setuptools import find_packages, setup

with open("README.md") as readme_file:
    README = readme_file.read()

setup_args = {
    "name": "ovbound",
    "version": os.environ.get("BUILD_VERSION", "0.1.0"),
    "description": "Derivative bounds for analytic self-maps of the disc omitting values",
    "long_description_content_type": "text/markdown",
    "long_description": README,
    "license": "MIT",
    "packages": find_packages(where="src", include=["ovbound", "ovbound.*"]),
    "package_data": {"ovbound": ["schema.yaml", "templates/*.j2"]},
    "keywords": ["Complex analysis", "Omitted values", "Schwarz lemma"],
    "entry_points": {"console_scripts": ["ovbound = ovbound.cli:main"]},
    "package_dir": {"": "src"},
    "python_requires": ">=3.9",
    "install_requires": ["numpy>=1.24", "PyYAML>=6.0.0", "Jinja2>=3.1.0"],
    "extras_require": {"test": ["pytest>=7.4", "hypothesis>=6.90", "sympy>=1.12"]},
}

if __name__ == "__main__":
    setup(**setup_args, include_package_data=True)
