"""
This package holds pavo, a stereo visual odometry back-end with surface normal constraints for
near-planar (pavement) scenes, its scene simulator and its trajectory evaluation tools.
"""
__author__ = 'Nicklas Borjesson'

# Version and release information used by setuptools for package generation.
__version__ = '1.0'
__release__ = '1.0.0'
__copyright__ = '2016-2026, Optimal BPM'
