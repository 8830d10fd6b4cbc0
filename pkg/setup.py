"""
Package generation for pavo

Created on Feb 18, 2016

@author: Nicklas Boerjesson
"""
from setuptools import setup, find_packages

import pavo

__author__ = 'Nicklas Borjesson'


def _requirements(_filename):
    with open(_filename, "r") as _file:
        return [_curr.strip() for _curr in _file if _curr.strip() and not _curr.startswith("#")]


setup(
    name="pavo",
    version=pavo.__release__,
    description="Stereo visual odometry with surface normal constraints for pavement scenes",
    author="Nicklas Borjesson",
    packages=find_packages(include=["pavo", "pavo.*"], exclude=["*.features", "*.features.*"]),
    package_data={"pavo.schemas": ["namespaces/*/*.json"]},
    install_requires=_requirements("requirements.txt"),
    extras_require={"dev": _requirements("dev-requirements.txt")},
    entry_points={"console_scripts": ["pavo = pavo.cli.main:run"]},
    python_requires=">=3.8"
)
