"""
This package holds the builders the behave features of pavo share: small scenes, noiseless maps and random
poses
"""
__author__ = 'Nicklas Borjesson'
