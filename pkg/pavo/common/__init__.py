"""
This package holds the common libraries used by all parts of pavo.
It includes logging, settings, errors and internal utilities.
"""
__author__ = 'Nicklas Borjesson'
