from behave import *

use_step_matcher("re")

from nose.tools.trivial import ok_
from pavo.common.logging import make_sparse_log_message, write_to_log, category_to_description, \
    severity_from_identifier, SEV_DEBUG, SEV_INFO, SEV_ERROR, SEV_FATAL, EC_RESOURCE, EC_NOTIFICATION
import pavo.common.logging

_global_params = None
_global_err_param = ("Test error", EC_RESOURCE, SEV_ERROR, "run 1", "1999-01-01 01:01:01.000001", 12, 0)
_global_sparse_cmp = "*pid: 0, ec: resource, sev: error, p_id: run 1, frame: 12, t: 1999-01-01 01:01:01.000001, " \
                     "data: Test error"


def local_test_log_writer(*args):
    global _global_params
    _global_params = args


@then("a sparse log message is built")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _msg = make_sparse_log_message(*_global_err_param)
    ok_(_msg == _global_sparse_cmp, "Sparse message did not match: \nResult:" + _msg +
        "\nComparison:\n" + _global_sparse_cmp)
    _debug = make_sparse_log_message("Test message", EC_NOTIFICATION, SEV_DEBUG, None, None, None, 0)
    ok_(_debug == " pid: 0, ec: notification, sev: debug, p_id: N/A, data: Test message", _debug)


@then("a multirow sparse log message puts the data below the header")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _msg = make_sparse_log_message("row 1\nrow 2", EC_NOTIFICATION, SEV_INFO, None, None, None, 0)
    ok_(_msg.endswith("data: (multirow, see below)\n===\nrow 1\nrow 2\n=== "), _msg)


@given("a log callback is installed")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    global _global_params
    _global_params = None
    pavo.common.logging.callback = local_test_log_writer


@then("the logging should call it")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    global _global_params
    write_to_log(*_global_err_param)
    ok_(_global_params == _global_err_param, "Global params didn't match!\nResult:" + str(_global_params) +
        "\nComparison: " + str(_global_err_param))
    _global_params = None


@then("messages below the severity threshold are not passed on")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    global _global_params
    _global_params = None
    write_to_log("Not shown", EC_NOTIFICATION, SEV_INFO)
    ok_(_global_params is None, "An information message passed the warning threshold")
    pavo.common.logging.severity = SEV_DEBUG
    write_to_log("Shown", EC_NOTIFICATION, SEV_INFO)
    ok_(_global_params is not None and _global_params[0] == "Shown", str(_global_params))


@then("write_to_log returns the message so that it can be raised")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        raise ValueError(write_to_log("Raised", EC_NOTIFICATION, SEV_FATAL))
    except ValueError as e:
        ok_(str(e) == "Raised", str(e))


@then("severities are parsed from their identifiers and numbers")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(severity_from_identifier("debug") == SEV_DEBUG)
    ok_(severity_from_identifier("error") == SEV_ERROR)
    ok_(severity_from_identifier("6") == SEV_FATAL)


@then("invalid log levels are refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in ["loud", "7", "-1"]:
        try:
            severity_from_identifier(_curr)
            ok_(False, _curr + " was accepted")
        except ValueError:
            pass


@then("event categories are described")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(category_to_description(EC_RESOURCE) == "error reading or writing files")
    ok_(category_to_description(99, "unknown category ") == "unknown category 99")
