"""
Contains functionality for reading, validating and writing the flat "key = value" run configuration

Created on Jan 22, 2016

@author: Nicklas Boerjesson
"""

import configparser
import os

from pavo.common.errors import ConfigError
from pavo.common.logging import write_to_log, EC_INVALID, SEV_ERROR, SEV_DEBUG, EC_NOTIFICATION
from pavo.schemas.validation import load_schema, validate

#: The schema describing every key, type, bound and default
run_config_schema_ref = "ref://pavo.run_config"

# The implicit section the flat format is parsed under
_section = "run"

_true_values = ["true", "yes", "on", "1"]
_false_values = ["false", "no", "off", "0"]


def _key_properties():
    return load_schema(run_config_schema_ref)["properties"]


def _parse_value(_key, _text, _filename=None):
    """Convert the text of a value to the type the schema declares for _key"""
    _type = _key_properties()[_key]["type"]
    _text = _text.strip()
    try:
        if _type == "integer":
            return int(_text)
        elif _type == "number":
            return float(_text)
        elif _type == "boolean":
            if _text.lower() in _true_values:
                return True
            elif _text.lower() in _false_values:
                return False
            raise ValueError("not a boolean")
        else:
            return _text
    except ValueError as e:
        raise ConfigError("RunConfig: Invalid " + _type + " value for \"" + _key + "\": \"" + _text + "\"" +
                          (" in " + _filename if _filename else "") + " (" + str(e) + ")", _key=_key)


def _format_value(_value):
    """Lossless text representation of a value"""
    if isinstance(_value, bool):
        return "true" if _value else "false"
    elif isinstance(_value, float):
        # repr is the shortest text that parses back to the identical float
        return repr(_value)
    else:
        return str(_value)


class RunConfig(object):
    """
    This class is responsible for holding a validated run configuration in memory.
    Every key has a documented default in the schema, files only need to hold the keys they change.
    """

    #: The values, keys in schema order
    values = None
    #: The file the values were read from, if any
    filename = None

    def __init__(self, _values=None, _filename=None):
        """
        Constructor, starts from the defaults, applies _values and validates the result.

        :param _values: A dict of key -> value, unknown keys are errors
        :param _filename: The file the values came from, used in messages
        """
        self.filename = _filename
        self.values = self.defaults()
        if _values:
            for _curr_key, _curr_value in _values.items():
                if _curr_key not in self.values:
                    raise ConfigError(write_to_log("RunConfig: Unknown configuration key \"" + str(_curr_key) + "\"" +
                                                   (" in " + _filename if _filename else ""),
                                                   _category=EC_INVALID, _severity=SEV_ERROR), _key=_curr_key)
                self.values[_curr_key] = _curr_value
        validate(self.values, run_config_schema_ref)

    @staticmethod
    def defaults():
        """The default value of every key"""
        return dict([(_curr_key, _curr_property["default"])
                     for _curr_key, _curr_property in _key_properties().items()])

    @staticmethod
    def describe(_key):
        """The documentation of a key"""
        return _key_properties()[_key]["description"]

    @classmethod
    def from_text(cls, _text, _filename=None):
        """
        Parse a configuration text

        :param _text: Lines of "key = value", # comments and blank lines are ignored
        :param _filename: Used in messages
        :return: A RunConfig
        """
        _parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",), interpolation=None,
                                            strict=True, empty_lines_in_values=False)
        # Keys are case sensitive
        _parser.optionxform = str
        try:
            _parser.read_string("[" + _section + "]\n" + _text, source=_filename or "<text>")
        except configparser.Error as e:
            raise ConfigError("RunConfig.from_text: Error parsing " + (_filename or "configuration") + ": " +
                              str(e).replace("\n", " "))

        if _parser.sections() != [_section]:
            raise ConfigError("RunConfig.from_text: Sections are not supported, found " +
                              ", ".join(["[" + _curr + "]" for _curr in _parser.sections() if _curr != _section]))

        _values = {}
        _known = _key_properties()
        for _curr_key, _curr_text in _parser.items(_section):
            if _curr_key not in _known:
                raise ConfigError(write_to_log("RunConfig: Unknown configuration key \"" + _curr_key + "\"" +
                                               (" in " + _filename if _filename else ""),
                                               _category=EC_INVALID, _severity=SEV_ERROR), _key=_curr_key)
            _values[_curr_key] = _parse_value(_curr_key, _curr_text, _filename)

        return cls(_values, _filename=_filename)

    @classmethod
    def from_file(cls, _filename):
        """Read and validate a configuration file"""
        with open(_filename, "r", encoding="utf-8") as _file:
            _text = _file.read()
        write_to_log("Loaded run configuration from " + os.path.abspath(_filename),
                     _category=EC_NOTIFICATION, _severity=SEV_DEBUG)
        return cls.from_text(_text, _filename=_filename)

    def to_text(self):
        """
        Every key, in schema order, as "key = value" lines. Parsing the result gives an identical configuration.
        """
        _lines = ["# pavo run configuration"]
        _group = None
        for _curr_key, _curr_property in _key_properties().items():
            if _curr_property.get("group") != _group:
                _group = _curr_property.get("group")
                _lines.append("")
                _lines.append("# " + str(_group))
            _lines.append(_curr_key + " = " + _format_value(self.values[_curr_key]))
        return "\n".join(_lines) + "\n"

    def write(self, _filename):
        with open(_filename, "w", encoding="utf-8") as _file:
            _file.write(self.to_text())

    def with_overrides(self, **kwargs):
        """A copy with some values replaced, validated"""
        _values = dict(self.values)
        for _curr_key, _curr_value in kwargs.items():
            if _curr_key not in _values:
                raise ConfigError("RunConfig.with_overrides: Unknown configuration key \"" + _curr_key + "\"",
                                  _key=_curr_key)
            _values[_curr_key] = _curr_value
        return RunConfig(_values, _filename=self.filename)

    def get(self, _key):
        return self.values[_key]

    def __getitem__(self, _key):
        return self.values[_key]

    def __eq__(self, _other):
        return isinstance(_other, RunConfig) and self.values == _other.values

    def __ne__(self, _other):
        return not self.__eq__(_other)

    def seeds(self):
        """The seeds of the A/B experiment as a list of ints"""
        return [int(_curr) for _curr in self.values["experiment_seeds"].split(",")]
