"""
This module holds the pavo JSON schema functionality, resolving of the ref:// scheme and validation

Created on Jan 22, 2016

@author: Nicklas Boerjesson
"""

import json
import os
from urllib.parse import urlparse

from jsonschema import Draft4Validator
from jsonschema.exceptions import SchemaError

from pavo.common.errors import ConfigError

__author__ = 'Nicklas Borjesson'

script_dir = os.path.dirname(os.path.abspath(__file__))

# Loaded schemas, keys are ref://-URIs
_cache = {}


def general_uri_handler(_uri, _folder):
    """
    This function looks up a JSON schema that matches the URI in the given folder
    :param _uri: The _uri to handle, like ref://pavo.run_config
    :param _folder: The folder holding the namespaces folder
    :return: The schema
    """

    # Parse the schema file reference
    _netloc = urlparse(_uri).netloc
    # Translate into file name
    _filename = _netloc.replace(".", "/")
    _file_location = os.path.abspath(os.path.join(_folder, "namespaces", _filename + ".json"))

    with open(_file_location, "r", encoding="utf-8") as _schema_file:
        _json = json.load(_schema_file)
    return _json


def pavo_uri_handler(_uri):
    """
    Resolves ref:// references against the schemas shipped with pavo
    :param _uri: The URI
    :return: The schema
    """
    return general_uri_handler(_uri, script_dir)


def pavo_schema_folder():
    return os.path.join(script_dir, "namespaces")


def load_schema(_schema_ref):
    """
    Loads, checks and caches a schema

    :param _schema_ref: The ref://-URI of the schema
    :return: The schema
    """
    if _schema_ref not in _cache:
        _schema = pavo_uri_handler(_schema_ref)
        try:
            Draft4Validator.check_schema(_schema)
        except SchemaError as scherr:
            raise Exception("load_schema: SchemaError in " + _schema_ref + " at path:" + str(
                list(scherr.path)) + "\nMessage:\n" + str(scherr.message))
        _cache[_schema_ref] = _schema
    return _cache[_schema_ref]


def validate(_data, _schema_ref):
    """
    Validate _data against a schema, raising a ConfigError naming the first offending key.

    :param _data: The data to validate
    :param _schema_ref: The ref://-URI of the schema
    :return: The data
    """
    _validator = Draft4Validator(load_schema(_schema_ref))
    _errors = sorted(_validator.iter_errors(_data), key=lambda _error: list(_error.path))
    if _errors:
        _error = _errors[0]
        if _error.path:
            _key = str(_error.path[0])
        elif _error.validator == "additionalProperties":
            # The message names the unexpected properties, the offending ones are those not in the schema
            _unknown = [_curr_key for _curr_key in _data if _curr_key not in _error.schema.get("properties", {})]
            _key = _unknown[0] if _unknown else None
        else:
            _key = None
        raise ConfigError("validate: Invalid value" + (" for \"" + _key + "\"" if _key else "") + ": " +
                          _error.message, _key=_key)
    return _data
