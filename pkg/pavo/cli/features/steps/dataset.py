import os

import numpy as np
import pandas as pd
from behave import *
from nose.tools.trivial import ok_

from pavo.cli.commands import cmd_simulate, cmd_run, cmd_evaluate
from pavo.cli.formats import Dataset, read_trajectory
from pavo.common.settings import RunConfig
from pavo.testing.builders import small_run_config_text

use_step_matcher("re")


def write_config(context, _text):
    context.paths["config"] = os.path.join(context.work_directory, "config.txt")
    with open(context.paths["config"], "w", encoding="utf-8") as _file:
        _file.write(_text)


def file_bytes(_filename):
    with open(_filename, "rb") as _file:
        return _file.read()


def estimate_filename(context):
    return os.path.join(context.work_directory, "est.txt")


def rewrite_observations(context, _change):
    """Replaces the lines of obs.csv of the dataset by _change(lines)"""
    _filename = os.path.join(context.paths["dataset"], "obs.csv")
    with open(_filename, "r", encoding="utf-8") as _file:
        _lines = _file.read().splitlines()
    with open(_filename, "w", encoding="utf-8") as _file:
        _file.write("\n".join(_change(_lines)) + "\n")


@given("the small noiseless configuration file")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    write_config(context, small_run_config_text)


@given("the small noiseless configuration file with (?P<setting>.*)")
def step_impl(context, setting):
    """
    :type context: behave.runner.Context
    """
    write_config(context, small_run_config_text + setting + "\n")


@given("the default configuration file")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    write_config(context, RunConfig().to_text())


@given("a simulated small noiseless dataset")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    write_config(context, small_run_config_text)
    context.paths["dataset"] = os.path.join(context.work_directory, "dataset")
    context.sequence = cmd_simulate(RunConfig.from_text(small_run_config_text), context.paths["dataset"])


@given("the frames from frame (?P<frame_id>\\d+) on have no observations")
def step_impl(context, frame_id):
    """
    :type context: behave.runner.Context
    """
    rewrite_observations(context, lambda _lines: [_lines[0]] + [_curr for _curr in _lines[1:]
                                                                if int(_curr.split(",")[0]) < int(frame_id)])


@given("line (?P<line_number>\\d+) of obs.csv has the uL value (?P<value>.*)")
def step_impl(context, line_number, value):
    """
    :type context: behave.runner.Context
    """
    def _change(_lines):
        _fields = _lines[int(line_number) - 1].split(",")
        _fields[2] = value
        _lines[int(line_number) - 1] = ",".join(_fields)
        return _lines

    rewrite_observations(context, _change)


@given("(?P<filename>\\S+) is removed from the dataset")
def step_impl(context, filename):
    """
    :type context: behave.runner.Context
    """
    os.remove(os.path.join(context.paths["dataset"], filename))


@when("the estimator is run on the dataset without normal factors")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.run_result, context.timings = cmd_run(context.paths["dataset"], estimate_filename(context),
                                                  _no_normal=True)


@when("the estimator is run on the dataset")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.run_result, context.timings = cmd_run(context.paths["dataset"], estimate_filename(context))


@then("the directory (?P<directory>\\S+) holds (?P<filenames>.*)")
def step_impl(context, directory, filenames):
    """
    :type context: behave.runner.Context
    """
    _directory = directory.format(**context.paths)
    for _curr in filenames.split(", "):
        ok_(os.path.isfile(os.path.join(_directory, _curr)), _curr + " is missing in " + str(os.listdir(_directory)))


@then("the ground truth of (?P<directory>\\S+) has (?P<count>\\d+) poses and the first is the identity")
def step_impl(context, directory, count):
    """
    :type context: behave.runner.Context
    """
    _trajectory = read_trajectory(os.path.join(directory.format(**context.paths), "traj_gt.txt"))
    ok_(len(_trajectory) == int(count), str(len(_trajectory)))
    ok_(np.allclose(_trajectory.poses[0].matrix(), np.eye(4), rtol=0, atol=1e-15), str(_trajectory.poses[0]))


@then("config_used.txt of (?P<directory>\\S+) is the small noiseless configuration")
def step_impl(context, directory):
    """
    :type context: behave.runner.Context
    """
    _used = RunConfig.from_file(os.path.join(directory.format(**context.paths), "config_used.txt"))
    ok_(_used == RunConfig.from_text(small_run_config_text), _used.to_text())


@then("every observation of (?P<directory>\\S+) is labelled an inlier")
def step_impl(context, directory):
    """
    :type context: behave.runner.Context
    """
    _observations = pd.read_csv(os.path.join(directory.format(**context.paths), "obs.csv"))
    ok_(len(_observations) > 0 and (_observations["is_outlier"] == 0).all())


@then("the dataset reads back as the simulated sequence")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _dataset = Dataset(context.paths["dataset"])
    _sequence = context.sequence
    ok_(_dataset.intrinsics.as_tuple() == _sequence.intrinsics.as_tuple())
    ok_(len(_dataset.frames) == len(_sequence.frames) == len(_dataset.ground_truth))
    for _read, _simulated, _pose, _ground_truth in zip(_dataset.frames, _sequence.frames, _sequence.poses,
                                                       _dataset.ground_truth.poses):
        ok_(_read.frame_id == _simulated.frame_id and _read.timestamp == _simulated.timestamp)
        ok_(np.array_equal(_read.landmark_ids, _simulated.landmark_ids))
        ok_(np.array_equal(_read.pixels, _simulated.pixels), "Pixels of frame " + str(_read.frame_id))
        ok_(np.array_equal(_read.is_outlier, _simulated.is_outlier))
        if _simulated.normal is None:
            ok_(_read.normal is None)
        else:
            ok_(np.allclose(_read.normal, _simulated.normal, rtol=0, atol=1e-12), str(_read.normal))
        ok_(np.allclose(_ground_truth.matrix(), _pose.inverse().matrix(), rtol=0, atol=1e-12))


@then("simulating it again writes byte-identical files")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _again = os.path.join(context.work_directory, "again")
    cmd_simulate(RunConfig.from_text(small_run_config_text), _again)
    _filenames = sorted(os.listdir(context.paths["dataset"]))
    ok_(_filenames == sorted(os.listdir(_again)), str(_filenames))
    for _curr in _filenames:
        ok_(file_bytes(os.path.join(context.paths["dataset"], _curr)) == file_bytes(os.path.join(_again, _curr)),
            _curr + " differs")


@then("the estimate has a pose at every ground truth timestamp")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _estimate = read_trajectory(estimate_filename(context))
    _ground_truth = read_trajectory(os.path.join(context.paths["dataset"], "traj_gt.txt"))
    ok_(np.array_equal(_estimate.timestamps, _ground_truth.timestamps), str(_estimate.timestamps))


@then("the ATE RMSE of the estimate is below (?P<limit>.*)")
def step_impl(context, limit):
    """
    :type context: behave.runner.Context
    """
    _result = cmd_evaluate(estimate_filename(context), os.path.join(context.paths["dataset"], "traj_gt.txt"),
                           None, 5)
    ok_(_result.ate.rmse < float(limit), repr(_result.ate))


@then("no bundle adjustment had a normal cost")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _reports = context.run_result.ba_reports
    ok_(len(_reports) > 0)
    ok_(all([_curr.normal_cost == 0.0 for _curr in _reports]), str([_curr.normal_cost for _curr in _reports]))


@then("running the estimator again writes a byte-identical estimate")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _again = os.path.join(context.work_directory, "est_again.txt")
    cmd_run(context.paths["dataset"], _again)
    ok_(file_bytes(estimate_filename(context)) == file_bytes(_again))


@then("the timings of tracking and mapping were recorded")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in ["tracking", "mapping"]:
        ok_(_curr in context.timings and context.timings[_curr]["count"] > 0, str(context.timings))
