import io
from contextlib import redirect_stderr, redirect_stdout

from behave import *
from nose.tools.trivial import ok_

from pavo.cli.main import main

use_step_matcher("re")


@when("the command line \"(?P<arguments>[^\"]*)\" is run")
def step_impl(context, arguments):
    """
    :type context: behave.runner.Context
    """
    _argv = arguments.format(**context.paths).split()
    with redirect_stderr(io.StringIO()) as _stderr, redirect_stdout(io.StringIO()) as _stdout:
        context.exit_code = main(_argv)
    context.stderr = _stderr.getvalue()
    context.stdout = _stdout.getvalue()


@then("the exit code is (?P<code>\\d+)")
def step_impl(context, code):
    """
    :type context: behave.runner.Context
    """
    ok_(context.exit_code == int(code), "Exit code " + str(context.exit_code) + ", error output:\n" + context.stderr)


@then("the error output contains (?P<text>.*)")
def step_impl(context, text):
    """
    :type context: behave.runner.Context
    """
    ok_(text in context.stderr, context.stderr)


@then("the output contains (?P<text>.*)")
def step_impl(context, text):
    """
    :type context: behave.runner.Context
    """
    ok_(text in context.stdout, context.stdout)
