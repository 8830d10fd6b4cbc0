import math

import numpy as np
from behave import *
from nose.tools.trivial import ok_
from scipy.optimize import least_squares
from scipy.spatial.transform import Rotation

from pavo.evaluation.metrics import align, ate, rde, evaluate, MetricReport
from pavo.evaluation.trajectory import Trajectory, associate, TooFewPoses, SequenceTooShort, TimestampMismatch
from pavo.geometry.lie import PoseSE3, exp_rotation
from pavo.testing.builders import random_pose, pose_difference

use_step_matcher("re")


def values(_text):
    return [float(_curr) for _curr in _text.split(",")]


def positions_trajectory(_text):
    """A trajectory of unrotated cameras at "x, y, z; x, y, z; ..." one tenth of a second apart"""
    _positions = [values(_curr) for _curr in _text.split(";")]
    return Trajectory(np.arange(len(_positions)) * 0.1, [PoseSE3(np.eye(3), _curr) for _curr in _positions])


def fitted_cost(_estimate, _ground_truth, _alignment):
    _residuals = _estimate.positions() - (_ground_truth.positions() @ _alignment.R.T + _alignment.t)
    return float(np.sum(_residuals * _residuals))


@given("a random ground truth trajectory of (?P<count>\\d+) poses")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    context.ground_truth = Trajectory(np.arange(int(count)) * 0.1,
                                      [random_pose(context.rng, _max_translation=10.0) for _ in range(int(count))])


@given("the ground truth positions (?P<positions>.*)")
def step_impl(context, positions):
    """
    :type context: behave.runner.Context
    """
    context.ground_truth = positions_trajectory(positions)


@given("the estimated positions (?P<positions>.*)")
def step_impl(context, positions):
    """
    :type context: behave.runner.Context
    """
    context.estimate = positions_trajectory(positions)


@when("the estimate is the ground truth")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.transform = PoseSE3.identity()
    context.estimate = context.ground_truth


@when("the estimate is the ground truth moved by a random (?P<kind>\\w+) transform")
def step_impl(context, kind):
    """
    :type context: behave.runner.Context
    """
    if kind == "vertical":
        context.transform = PoseSE3(exp_rotation([0.0, 0.0, context.rng.uniform(-math.pi, math.pi)]),
                                    context.rng.uniform(-5.0, 5.0, 3))
    else:
        context.transform = random_pose(context.rng, _max_angle=1.0, _max_translation=5.0)
    context.estimate = context.ground_truth.transformed(context.transform)


@when("(?P<noise>\\d+) cm of noise is added to the estimated positions")
def step_impl(context, noise):
    """
    :type context: behave.runner.Context
    """
    context.estimate = Trajectory(context.estimate.timestamps,
                                  [PoseSE3(_curr.R, _curr.t + context.rng.normal(0.0, int(noise) / 100.0, 3))
                                   for _curr in context.estimate.poses])


@when("the estimated timestamps are 10 ms late and the first 3 estimated poses are missing")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.estimate = Trajectory(context.estimate.timestamps[3:] + 0.01, context.estimate.poses[3:])


@then("the 3d alignment is the identity")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _alignment = align(context.estimate, context.ground_truth, "3d")
    ok_(np.allclose(_alignment.R, np.eye(3), rtol=0, atol=1e-12), str(_alignment))
    ok_(np.allclose(_alignment.t, np.zeros(3), rtol=0, atol=1e-12), str(_alignment))


@then("the (?P<mode>\\dd) alignment is that transform")
def step_impl(context, mode):
    """
    :type context: behave.runner.Context
    """
    _angle, _distance = pose_difference(align(context.estimate, context.ground_truth, mode), context.transform)
    ok_(_angle < 1e-9 and _distance < 1e-9, str((_angle, _distance)))


@then("every absolute trajectory error is 0")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _report = ate(context.estimate, context.ground_truth, align(context.estimate, context.ground_truth))
    ok_(len(_report) == len(context.ground_truth) and _report.max < 1e-9, str(_report))


@then("every relative distance error over (?P<delta>\\d+) frames is 0")
def step_impl(context, delta):
    """
    :type context: behave.runner.Context
    """
    _report = rde(context.estimate, context.ground_truth, int(delta))
    ok_(len(_report) == len(context.ground_truth) - int(delta) and _report.max < 1e-9, str(_report))


@then("the 3d alignment matches an iterative least squares fit within (?P<tolerance>.*)")
def step_impl(context, tolerance):
    """
    :type context: behave.runner.Context
    """
    _data, _model = context.estimate.positions(), context.ground_truth.positions()

    def _residuals(_x):
        return (_data - (Rotation.from_rotvec(_x[:3]).apply(_model) + _x[3:])).ravel()

    _fit = least_squares(_residuals, np.zeros(6), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    _iterative = PoseSE3(Rotation.from_rotvec(_fit.x[:3]).as_matrix(), _fit.x[3:])
    _alignment = align(context.estimate, context.ground_truth, "3d")
    ok_(fitted_cost(context.estimate, context.ground_truth, _alignment) <=
        fitted_cost(context.estimate, context.ground_truth, _iterative) * (1 + 1e-9))
    _angle, _distance = pose_difference(_alignment, _iterative)
    ok_(_angle < float(tolerance) and _distance < float(tolerance), str((_angle, _distance)))


@then("the 2d alignment is a rotation about z")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _R = align(context.estimate, context.ground_truth, "2d").R
    ok_(_R[2, 2] == 1.0 and np.all(_R[:2, 2] == 0.0) and np.all(_R[2, :2] == 0.0), str(_R))
    ok_(np.allclose(_R @ _R.T, np.eye(3), rtol=0, atol=1e-12))


@then("without alignment the absolute trajectory errors are (?P<errors>.*)")
def step_impl(context, errors):
    """
    :type context: behave.runner.Context
    """
    context.report = ate(context.estimate, context.ground_truth, PoseSE3.identity())
    ok_(np.allclose(context.report.errors, values(errors), rtol=0, atol=1e-12), str(context.report.errors))


@then("their mean is (?P<mean>.*) and their RMSE is (?P<rmse>.*)")
def step_impl(context, mean, rmse):
    """
    :type context: behave.runner.Context
    """
    ok_(abs(context.report.mean - float(mean)) < 1e-12 and abs(context.report.rmse - float(rmse)) < 1e-12,
        str(context.report))


@then("the relative distance errors over (?P<delta>\\d+) frames? are (?P<errors>.*)")
def step_impl(context, delta, errors):
    """
    :type context: behave.runner.Context
    """
    _report = rde(context.estimate, context.ground_truth, int(delta))
    ok_(np.allclose(_report.errors, values(errors), rtol=0, atol=1e-12), str(_report.errors))


@then("aligning them fails with TooFewPoses")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        align(context.estimate, context.ground_truth)
        ok_(False, "Two poses were aligned")
    except TooFewPoses:
        pass


@then("the relative distance error over (?P<delta>\\d+) frames fails with SequenceTooShort")
def step_impl(context, delta):
    """
    :type context: behave.runner.Context
    """
    try:
        rde(context.estimate, context.ground_truth, int(delta))
        ok_(False, "No error was raised")
    except SequenceTooShort:
        pass
    ok_(len(rde(context.estimate, context.ground_truth, int(delta) - 1)) == 1)


@then("the statistics of the errors (?P<errors>.*) are a mean of (?P<mean>.*), a median of (?P<median>.*), "
      "an RMSE of (?P<rmse>.*) and an SD of (?P<sd>.*)")
def step_impl(context, errors, mean, median, rmse, sd):
    """
    :type context: behave.runner.Context
    """
    _report = MetricReport(values(errors))
    for _curr_name, _curr_expected in [("mean", mean), ("median", median), ("rmse", rmse), ("sd", sd)]:
        ok_(abs(getattr(_report, _curr_name) - float(_curr_expected)) < 1e-12,
            _curr_name + " is " + str(getattr(_report, _curr_name)))
    ok_(abs(_report.sd ** 2 - (_report.rmse ** 2 - _report.mean ** 2)) < 1e-12)


@then("the statistics of no errors are not a number")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _report = MetricReport([])
    ok_(math.isnan(_report.mean) and math.isnan(_report.rmse) and math.isnan(_report.sd) and len(_report) == 0)


@then("(?P<matched>\\d+) poses are associated and (?P<dropped>\\d+) ground truth poses are dropped")
def step_impl(context, matched, dropped):
    """
    :type context: behave.runner.Context
    """
    _estimate, _ground_truth, _report = associate(context.estimate, context.ground_truth)
    ok_(_report.matched == int(matched) and _report.dropped_ground_truth == int(dropped) and
        _report.dropped_estimate == 0, str(_report))
    ok_(np.allclose(_estimate.timestamps - _ground_truth.timestamps, 0.01, rtol=0, atol=1e-12))


@then("evaluating over (?P<delta>\\d+) frames gives zero errors for (?P<frames>\\d+) frames and "
      "(?P<distances>\\d+) relative distances")
def step_impl(context, delta, frames, distances):
    """
    :type context: behave.runner.Context
    """
    _result = evaluate(context.estimate, context.ground_truth, int(delta))
    ok_(len(_result.ate) == int(frames) and _result.ate.max < 1e-9, str(_result.ate))
    ok_(len(_result.rde) == int(distances) and _result.rde.max < 1e-9, str(_result.rde))
    ok_(_result.delta == int(delta) and len(_result.timestamps) == int(frames))


@then("estimated timestamps 1 hour late cannot be associated")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        associate(Trajectory(context.estimate.timestamps + 3600.0, context.estimate.poses), context.ground_truth)
        ok_(False, "Trajectories an hour apart were associated")
    except TimestampMismatch:
        pass


@then("decreasing timestamps are refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        Trajectory([0.0, 0.2, 0.1], context.ground_truth.poses[:3])
        ok_(False, "Decreasing timestamps were accepted")
    except TimestampMismatch:
        pass
