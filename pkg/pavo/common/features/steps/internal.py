import inspect

from behave import *
from nose.tools.trivial import ok_

from pavo.common.errors import ConfigError, DataFormatError, OutputExistsError, PavoError, exit_code_for, \
    category_for, EXIT_DATA, EXIT_USAGE, EXIT_ESTIMATOR
from pavo.common.logging import EC_INVALID, EC_RESOURCE, EC_INTERNAL
from pavo.common.internal import timed, timings, reset_timings, summarize_timings

use_step_matcher("re")


@given('a function timed under "(?P<key>.*)"')
def step_impl(context, key):
    """
    :type context behave.runner.Context
    """
    reset_timings()

    @timed(key)
    def timed_function(_a, _b=2):
        """Adds"""
        return _a + _b

    context.timed_function = timed_function
    context.key = key


@when("it is called 3 times")
def step_impl(context):
    """
    :type context behave.runner.Context
    """
    for _curr in range(3):
        ok_(context.timed_function(_curr) == _curr + 2)


@then('3 durations are summarized under "(?P<key>.*)"')
def step_impl(context, key):
    """
    :type context behave.runner.Context
    """
    _summary = summarize_timings()
    ok_(_summary[key]["count"] == 3, str(_summary))
    ok_(_summary[key]["mean"] >= 0 and _summary[key]["median"] >= 0, str(_summary))


@then("resetting the timings forgets them")
def step_impl(context):
    """
    :type context behave.runner.Context
    """
    reset_timings()
    ok_(timings == {} and summarize_timings() == {})


@then("its name and arguments are kept")
def step_impl(context):
    """
    :type context behave.runner.Context
    """
    ok_(context.timed_function.__name__ == "timed_function")
    ok_(context.timed_function.__doc__ == "Adds")
    ok_(list(inspect.signature(context.timed_function).parameters) == ["_a", "_b"])


@then("configuration and data errors exit with 2")
def step_impl(context):
    """
    :type context behave.runner.Context
    """
    ok_(exit_code_for(ConfigError("bad", _key="seed")) == EXIT_DATA)
    ok_(exit_code_for(DataFormatError("bad")) == EXIT_DATA)
    ok_(exit_code_for(FileNotFoundError("missing")) == EXIT_DATA)


@then("an existing output directory exits with 1")
def step_impl(context):
    """
    :type context behave.runner.Context
    """
    ok_(exit_code_for(OutputExistsError("exists")) == EXIT_USAGE)


@then("other failures exit with 3")
def step_impl(context):
    """
    :type context behave.runner.Context
    """
    ok_(exit_code_for(RuntimeError("failed")) == EXIT_ESTIMATOR)
    ok_(isinstance(ConfigError("bad"), PavoError) and isinstance(ConfigError("bad"), ValueError))


@then("data format errors name the file and the line")
def step_impl(context):
    """
    :type context behave.runner.Context
    """
    _error = DataFormatError("Invalid uL", "obs.csv", 4)
    ok_(str(_error) == "obs.csv:4: Invalid uL", str(_error))
    ok_(_error.filename == "obs.csv" and _error.line_number == 4)


@then("errors are logged under their own categories")
def step_impl(context):
    """
    :type context behave.runner.Context
    """
    ok_(category_for(ConfigError("bad")) == EC_INVALID)
    ok_(category_for(OutputExistsError("exists")) == EC_RESOURCE)
    ok_(category_for(FileNotFoundError("missing")) == EC_RESOURCE)
    ok_(category_for(ValueError("bad")) == EC_INVALID)
    ok_(category_for(RuntimeError("failed")) == EC_INTERNAL)
