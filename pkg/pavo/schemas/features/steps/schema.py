"""
Tests for the pavo schema feature
"""
import os

from behave import *
from jsonschema import Draft4Validator
from nose.tools.trivial import ok_

from pavo.common.errors import ConfigError
from pavo.schemas.validation import load_schema, validate, pavo_schema_folder

use_step_matcher("re")

script_location = os.path.dirname(__file__)


def defaults(_schema):
    return dict([(_curr_key, _curr["default"]) for _curr_key, _curr in _schema["properties"].items()])


def error_key(_data, _schema_ref):
    try:
        validate(_data, _schema_ref)
    except ConfigError as e:
        return e.key
    return None


@given("it loads the run configuration schema")
def step_impl(context):
    """

    :type context behave.runner.Context

    """
    context.schema = load_schema(context.schema_ref)


@then("the schema is a valid Draft 4 schema with a default for every property")
def step_impl(context):
    """

    :type context behave.runner.Context

    """
    Draft4Validator.check_schema(context.schema)
    ok_(os.path.exists(os.path.join(pavo_schema_folder(), "pavo", "run_config.json")))
    for _curr_key, _curr in context.schema["properties"].items():
        ok_("default" in _curr and "description" in _curr and "group" in _curr, _curr_key)


@then("loading it again returns the cached schema")
def step_impl(context):
    """

    :type context behave.runner.Context

    """
    ok_(load_schema(context.schema_ref) is context.schema)


@then("the defaults validate")
def step_impl(context):
    """

    :type context behave.runner.Context

    """
    _data = defaults(context.schema)
    ok_(validate(_data, context.schema_ref) is _data)


@then("a value of the wrong type is reported with its key")
def step_impl(context):
    """

    :type context behave.runner.Context

    """
    _data = defaults(context.schema)
    _data["seed"] = "forty-two"
    ok_(error_key(_data, context.schema_ref) == "seed")


@then("a value outside its bounds is reported with its key")
def step_impl(context):
    """

    :type context behave.runner.Context

    """
    _data = defaults(context.schema)
    _data["chi2_threshold"] = 0.0
    ok_(error_key(_data, context.schema_ref) == "chi2_threshold")
    _data = defaults(context.schema)
    _data["experiment_seeds"] = "1,,2"
    ok_(error_key(_data, context.schema_ref) == "experiment_seeds")


@then("an unknown property is reported with its name")
def step_impl(context):
    """

    :type context behave.runner.Context

    """
    _data = defaults(context.schema)
    _data["bogus"] = 1
    ok_(error_key(_data, context.schema_ref) == "bogus")
