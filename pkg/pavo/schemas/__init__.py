"""
This package holds the JSON schemas of pavo and the functionality to resolve the ref:// scheme
"""
__author__ = 'Nicklas Borjesson'
