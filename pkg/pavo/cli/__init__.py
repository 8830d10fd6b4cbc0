"""
This package holds the command line of pavo and the file formats of its datasets
"""
__author__ = 'Nicklas Borjesson'
