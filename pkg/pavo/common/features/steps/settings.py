import os
import tempfile

from behave import *

use_step_matcher("re")

from nose.tools.trivial import ok_
from pavo.common.errors import ConfigError
from pavo.common.settings import RunConfig


@given("the default run configuration")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.run_config = RunConfig()


@then("it holds the documented defaults")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _expected = {"chi2_threshold": 7.815, "normal_weight": 1e4, "normal_init_window": 10, "rde_delta": 20,
                 "max_iterations": 20, "keyframe_max_gap": 5, "outlier_rate": 0.05, "noise_px": 0.5,
                 "roughness": 0.01, "seed": 42, "track_with_normal": True, "align_mode": "3d"}
    for _curr_key, _curr_value in _expected.items():
        ok_(context.run_config[_curr_key] == _curr_value, _curr_key + " is " + str(context.run_config[_curr_key]))
    ok_(context.run_config.seeds() == list(range(1, 11)), str(context.run_config.seeds()))


@then("every key is documented")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr_key in context.run_config.values:
        ok_(len(RunConfig.describe(_curr_key)) > 0, _curr_key + " has no description")


@given("a run configuration with overridden values")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.run_config = RunConfig().with_overrides(seed=3, normal_weight=0.1 + 0.2, step_tolerance=1e-11,
                                                    track_with_normal=False, trajectory_shape="straight",
                                                    experiment_seeds="5,6")


@when("it is written as text and parsed again")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.parsed = RunConfig.from_text(context.run_config.to_text())


@then("the parsed configuration is identical")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.parsed == context.run_config, "Differences: " + str(
        [_curr for _curr in context.run_config.values if context.parsed[_curr] != context.run_config[_curr]]))
    ok_(context.parsed["normal_weight"] == 0.1 + 0.2, repr(context.parsed["normal_weight"]))


@given("a configuration file changing the seed and lambda")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.directory = tempfile.mkdtemp()
    context.filename = os.path.join(context.directory, "run.cfg")
    with open(context.filename, "w") as _file:
        _file.write("# A test configuration\n\nseed = 1234\nnormal_weight = 50.0\n")


@when("the configuration file is loaded")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.run_config = RunConfig.from_file(context.filename)


@then("the changed keys are read and the others keep their defaults")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.run_config["seed"] == 1234)
    ok_(context.run_config["normal_weight"] == 50.0)
    ok_(context.run_config["chi2_threshold"] == 7.815)
    ok_(context.run_config.filename == context.filename)
    os.remove(context.filename)
    os.rmdir(context.directory)


@when('the configuration text "(?P<text>.*)" is parsed')
def step_impl(context, text):
    """
    :type context: behave.runner.Context
    """
    context.error = None
    try:
        RunConfig.from_text(text)
    except ConfigError as e:
        context.error = e


@then('a ConfigError for "(?P<key>.*)" is raised')
def step_impl(context, key):
    """
    :type context: behave.runner.Context
    """
    ok_(context.error is not None, "No error was raised")
    ok_(context.error.key == key, "The error names " + str(context.error.key) + ": " + str(context.error))


@when("a configuration with a section is parsed")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.error = None
    try:
        RunConfig.from_text("seed = 1\n[other]\nseed = 2\n")
    except ConfigError as e:
        context.error = e


@then("a ConfigError is raised")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.error is not None, "No error was raised")


@given("a run configuration listing the seeds 3,1,4")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.run_config = RunConfig.from_text("experiment_seeds = 3,1,4")


@then("the seeds are 3, 1 and 4")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.run_config.seeds() == [3, 1, 4], str(context.run_config.seeds()))
