"""
This module holds the exception hierarchy of pavo and the mapping from errors to process exit codes.

Created on Feb 2, 2016

@author: Nicklas Boerjesson
"""
from pavo.common.logging import EC_INTERNAL, EC_INVALID, EC_RESOURCE

__author__ = 'Nicklas Borjesson'

# Process exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ESTIMATOR = 3


class PavoError(Exception):
    """
    The base of all pavo errors. Each error class knows its event category and the exit code
    a command should terminate with when it is not handled.
    """
    category = EC_INTERNAL
    exit_code = EXIT_DATA


class ConfigError(PavoError, ValueError):
    """A run configuration failed to parse or validate. The offending key is kept in .key"""
    category = EC_INVALID
    exit_code = EXIT_DATA

    def __init__(self, _message, _key=None):
        super(ConfigError, self).__init__(_message)
        self.key = _key


class DataFormatError(PavoError, ValueError):
    """A data file was malformed. The file name and the 1-based line number are kept."""
    category = EC_INVALID
    exit_code = EXIT_DATA

    def __init__(self, _message, _filename=None, _line_number=None):
        _where = ""
        if _filename is not None:
            _where = str(_filename) + (":" + str(_line_number) if _line_number is not None else "") + ": "
        super(DataFormatError, self).__init__(_where + _message)
        self.filename = _filename
        self.line_number = _line_number


class OutputExistsError(PavoError):
    """An output directory already holds files and --force was not given."""
    category = EC_RESOURCE
    exit_code = EXIT_USAGE


def exit_code_for(_error):
    """
    Returns the process exit code for an exception
    :param _error: The exception
    :return: 2 for data errors, 3 for estimator failures and so on
    """
    if isinstance(_error, PavoError):
        return _error.exit_code
    if isinstance(_error, (IOError, OSError, ValueError)):
        return EXIT_DATA
    return EXIT_ESTIMATOR


def category_for(_error):
    """
    Returns the event category an exception is logged with
    :param _error: The exception
    :return: The category of pavo errors, resource for file errors and invalid for other value errors
    """
    if isinstance(_error, PavoError):
        return _error.category
    if isinstance(_error, (IOError, OSError)):
        return EC_RESOURCE
    if isinstance(_error, ValueError):
        return EC_INVALID
    return EC_INTERNAL
