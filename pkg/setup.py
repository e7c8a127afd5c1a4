"""
chainlock
planning and certifying reconfigurations of polygonal chains in 3D: straightening, convexifying, locked examples
"""
import sys
from setuptools import setup, find_packages

short_description = __doc__.split("\n")

# from https://github.com/pytest-dev/pytest-runner#conditional-requirement
needs_pytest = {'pytest', 'test', 'ptr'}.intersection(sys.argv)
pytest_runner = ['pytest-runner'] if needs_pytest else []

try:
    with open("README.md", "r") as handle:
        long_description = handle.read()
except:
    long_description = "\n".join(short_description[2:])


setup(
    # Self-descriptive entries which should always be present
    name='chainlock',
    author='dominic rufa',
    author_email='dominic.rufa@gmail.com',
    description=short_description[1],
    long_description=long_description,
    long_description_content_type="text/markdown",
    version='0.1.0',
    license='MIT',

    # Which Python importable modules should be included when your package is installed
    packages=find_packages(),

    # sample chains in chainlock/data
    include_package_data=True,
    package_data={'chainlock': ['data/*.json', 'data/README.md']},

    # Allows `setup.py test` to work correctly with pytest
    setup_requires=[] + pytest_runner,

    install_requires=['numpy', 'scipy', 'sympy'],
    entry_points={'console_scripts': ['chainlock = chainlock.cli:main']},
    python_requires=">=3.8",
)
