"""
This is the central logging facility of pavo.

All modules write through write_to_log. A callback can be installed to redirect messages,
otherwise they are forwarded to the standard library logger named "pavo".

Created on Jan 22, 2016

@author: Nicklas Boerjesson

"""
import datetime
import logging
import os

__author__ = 'Nicklas Borjesson'

# Severity levels
SEV_DEBUG = 0  # Debugging message
SEV_INFO = 1  # Informational message
SEV_WARNING = 2  # A warning
SEV_ALERT = 3  # Action must be taken immediately
SEV_USER = 4  # A user error or error that can be corrected by the user
SEV_ERROR = 5  # A problem but doesn't stop execution
SEV_FATAL = 6  # A problem that causes something to stop functioning

# EVENT CATEGORIES

EC_NOTIFICATION = 0  # A notification

# Errors
EC_INTERNAL = 1  # An internal error, likely a bug in the system
EC_INVALID = 2  # A validation error, a configuration or data file failed to validate
EC_SERVICE = 3  # A command line level error, such as usage errors
EC_RESOURCE = 4  # A resource error, like a missing or unwritable file
EC_NUMERIC = 5  # The solver failed to make progress
EC_TRACKING = 6  # Tracking was lost or degraded
EC_MAPPING = 7  # Keyframe insertion, bundle adjustment or outlier rejection
EC_UNCATEGORIZED = 8  # Uncategorized error

# Human representations

severity_identifiers = [
    "debug",
    "information",
    "warning",
    "alert",
    "user",
    "error",
    "fatal"
]

category_identifiers = [
    "notification",
    "internal",
    "invalid",
    "service",
    "resource",
    "numeric",
    "tracking",
    "mapping",
    "uncategorized"
]

category_descriptions = [
    "notification message",
    "internal error, likely a bug in the system",
    "validation error, configuration or data failed to validate",
    "command line error",
    "error reading or writing files",
    "the solver failed to make progress",
    "tracking was lost or degraded",
    "mapping, bundle adjustment or outlier rejection",
    "uncategorized error"
]

# Standard library logging levels for each severity
_logging_levels = [
    logging.DEBUG,
    logging.INFO,
    logging.WARNING,
    logging.WARNING,
    logging.ERROR,
    logging.ERROR,
    logging.CRITICAL
]

"""The logging callback"""
callback = None
severity = SEV_WARNING

logger = logging.getLogger("pavo")


def severity_to_identifier(_severity, _error="invalid severity:"):
    """Returns a matching severity identifiers"""
    if isinstance(_severity, int) and 0 <= _severity < len(severity_identifiers):
        return str(severity_identifiers[_severity])
    else:
        return _error + str(_severity)


def category_to_identifier(_category, _error="invalid category: "):
    """Returns a matching category identifiers"""
    if isinstance(_category, int) and 0 <= _category < len(category_identifiers):
        return str(category_identifiers[_category])
    else:
        return _error + str(_category)


def category_to_description(_category, _error=""):
    """Returns a matching category description"""
    if isinstance(_category, int) and 0 <= _category < len(category_descriptions):
        return str(category_descriptions[_category])
    else:
        return _error + str(_category)


def severity_from_identifier(_identifier):
    """
    Parses a severity from its identifier or its number, used by the --log_level command line option.

    :param _identifier: "debug", "information", ... or "0".."6"
    :return: The severity level
    """
    if _identifier in severity_identifiers:
        return severity_identifiers.index(_identifier)
    try:
        _level = int(_identifier)
    except ValueError:
        raise ValueError("Invalid log level: " + str(_identifier) + ", use one of " +
                         ", ".join(severity_identifiers))
    if not 0 <= _level < len(severity_identifiers):
        raise ValueError("Invalid log level: " + str(_identifier))
    return _level


def write_to_log(_data, _category=EC_NOTIFICATION, _severity=SEV_INFO, _process_id=None,
                 _occurred_when=None, _frame_id=None, _pid=None):
    """
    Writes a message to the log using the current facility

    :param _data: The error message
    :param _category: The event category (defaults to EC_NOTIFICATION)
    :param _severity: The severity of the error (defaults to SEV_INFO)
    :param _process_id: The run or experiment id
    :param _occurred_when: The time of occurrence (defaults to the current time)
    :param _frame_id: The frame or keyframe the message concerns
    :param _pid: The system pid
    :return: _data, so that the call can be wrapped in a raise
    """
    if _severity < severity:
        return _data

    _occurred_when = _occurred_when if _occurred_when is not None else str(datetime.datetime.utcnow())
    _pid = _pid if _pid is not None else os.getpid()

    if callback is not None:
        callback(_data, _category, _severity, _process_id, _occurred_when, _frame_id, _pid)
    else:
        logger.log(_logging_levels[_severity],
                   make_sparse_log_message(_data, _category, _severity, _process_id, _occurred_when,
                                           _frame_id, _pid))

    return _data


def make_sparse_log_message(_data, _category=None, _severity=None, _process_id=None,
                            _occurred_when=None, _frame_id=None, _pid=None):
    """
    Build a sparse textual message based on available information. One row unless data is multirow.

    :param _data: The message text or data
    :param _category: The kind of error
    :param _severity: The severity of the error
    :param _process_id: The run or experiment id
    :param _occurred_when: The time of occurrence
    :param _frame_id: The frame the message concerns
    :param _pid: The system pid

    :return: A message

    """
    if _severity == SEV_DEBUG:
        _prefix = " "
    elif _severity in [SEV_INFO, SEV_ALERT, SEV_WARNING]:
        _prefix = "-"
    else:
        _prefix = "*"

    _result = _prefix + "pid: " + (str(_pid) if _pid is not None else str(os.getpid()))
    _result += ", ec: " + (category_to_identifier(_category, "INV") if _category is not None else "N/A")
    _result += ", sev: " + (severity_to_identifier(_severity, "INV") if _severity is not None else "N/A")
    _result += ", p_id: " + (str(_process_id) if _process_id is not None else "N/A")
    _result += ", frame: " + str(_frame_id) if _frame_id is not None else ""
    _result += ", t: " + str(_occurred_when) if _occurred_when is not None else ""

    if "\n" in str(_data):
        _result += ", data: (multirow, see below)\n===\n" + str(_data) + "\n=== "
    else:
        _result += ", data: " + str(_data)

    return _result
