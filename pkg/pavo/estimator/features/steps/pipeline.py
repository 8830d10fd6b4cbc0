import dataclasses
import math

import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.common.internal import reset_timings, summarize_timings
from pavo.common.settings import RunConfig
from pavo.estimator.config import SolverConfig, TrackingLost
from pavo.estimator.pipeline import run_sequence
from pavo.geometry.lie import PoseSE3
from pavo.simulator.config import SceneConfig
from pavo.simulator.sequence import simulate_sequence
from pavo.testing.builders import trajectory_ate_rmse, small_scene

use_step_matcher("re")


@when("the estimator is run on the sequence with lambda (?P<normal_weight>.*)")
def step_impl(context, normal_weight):
    """
    :type context: behave.runner.Context
    """
    context.solver_config = SolverConfig().with_normal_weight(float(normal_weight))
    context.result = run_sequence(context.sequence.frames, context.sequence.intrinsics, context.solver_config)
    context.map = context.result.map


@when("the estimator is run on the sequence")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    reset_timings()
    context.solver_config = SolverConfig()
    context.result = run_sequence(context.sequence.frames, context.sequence.intrinsics, context.solver_config)
    context.map = context.result.map


@then("every frame has a pose and the first is the identity")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(len(context.result.poses) == len(context.sequence.frames))
    ok_([_curr.frame_id for _curr in context.result.poses] == list(range(len(context.sequence.frames))))
    ok_(context.result.poses[0].pose == PoseSE3.identity())


@then("the first frame is a keyframe and keyframes were bundle adjusted")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.result.poses[0].is_keyframe)
    ok_(context.result.keyframe_count >= 2, str(context.result.keyframe_count))
    ok_(len(context.result.ba_reports) == context.result.keyframe_count - 1, str(len(context.result.ba_reports)))
    ok_(sum([_curr.is_keyframe for _curr in context.result.poses]) == context.result.keyframe_count)


@then("the ATE RMSE against the ground truth is below (?P<tolerance>.*)")
def step_impl(context, tolerance):
    """
    :type context: behave.runner.Context
    """
    _rmse = trajectory_ate_rmse(context.result.poses, context.sequence)
    ok_(_rmse < float(tolerance), "ATE RMSE " + str(_rmse))


@then("running it again gives bit-identical poses")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _again = run_sequence(context.sequence.frames, context.sequence.intrinsics, context.solver_config)
    for _first, _second in zip(context.result.poses, _again.poses):
        ok_(np.array_equal(_first.pose.matrix(), _second.pose.matrix()), "Frame " + str(_first.frame_id) + " differs")
        ok_(_first.is_keyframe == _second.is_keyframe)
    ok_(np.array_equal(context.result.map.global_normal, _again.map.global_normal))


@then("no normal cost was added by any bundle adjustment")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(len(context.result.ba_reports) > 0)
    for _curr in context.result.ba_reports:
        ok_(_curr.normal_cost == 0.0, str(_curr))


@when("every frame from frame (?P<frame_id>\\d+) on is empty")
def step_impl(context, frame_id):
    """
    :type context: behave.runner.Context
    """
    context.frames = [_curr if _curr.frame_id < int(frame_id) else
                      dataclasses.replace(_curr, landmark_ids=np.zeros(0), pixels=np.zeros((0, 3)), is_outlier=None)
                      for _curr in context.sequence.frames]


@then("running the estimator fails with TrackingLost at frame (?P<frame_id>\\d+)")
def step_impl(context, frame_id):
    """
    :type context: behave.runner.Context
    """
    try:
        run_sequence(context.frames, context.sequence.intrinsics, SolverConfig())
        ok_(False, "The estimator did not lose track")
    except TrackingLost as e:
        ok_(e.frame_id == int(frame_id), str(e.frame_id))


@then("running the estimator on frames 0, 1, 1 is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _frames = [context.sequence.frames[_curr] for _curr in [0, 1, 1]]
    try:
        run_sequence(_frames, context.sequence.intrinsics, SolverConfig())
        ok_(False, "Frames out of order were accepted")
    except ValueError:
        pass


@then("the solver configuration of the default run configuration holds the documented defaults")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _config = SolverConfig.from_run_config(RunConfig())
    ok_(_config.max_iterations == 20 and _config.chi2_threshold == 7.815 and _config.normal_weight == 1e4)
    ok_(_config.normal_init_window == 10 and _config.keyframe_max_gap == 5 and _config.track_with_normal)
    ok_(_config.observation_weight == 1.0)


@then("changing lambda keeps every other setting")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _config = SolverConfig(max_iterations=7, local_window=4)
    _changed = _config.with_normal_weight(0.0)
    ok_(_changed.normal_weight == 0.0 and _config.normal_weight == 1e4)
    ok_(_changed.max_iterations == 7 and _changed.local_window == 4)
    ok_(_changed.loss.delta_repro == _config.loss.delta_repro)


@then("tracking took less than (?P<limit>\\d+) ms per frame on average")
def step_impl(context, limit):
    """
    :type context: behave.runner.Context
    """
    _summary = summarize_timings()
    ok_(_summary["tracking"]["count"] == len(context.sequence.frames) - 1, str(_summary))
    ok_(_summary["tracking"]["mean"] < float(limit), str(_summary))


@then("no landmark is left with a single observer two keyframes after its triangulation")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _keyframe_count = len(context.map.keyframes)
    _stale = [_curr.id for _curr in context.map.landmarks.values()
              if len(_curr.observers) <= 1 and _keyframe_count - _curr.created_at >= 2]
    ok_(_stale == [], str(len(_stale)) + " stale landmarks")


@given("the default flight over flat pavement without noise")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.sequence = simulate_sequence(SceneConfig(roughness=0.0, noise_px=0.0, outlier_rate=0.0,
                                                     normal_noise_deg=0.0))
    ok_(len(context.sequence.frames) == 1501)


@then("every estimated rotation is orthonormal within (?P<tolerance>.*)")
def step_impl(context, tolerance):
    """
    :type context: behave.runner.Context
    """
    _worst = max([float(np.max(np.abs(_curr.pose.R.T @ _curr.pose.R - np.eye(3)))) for _curr in context.result.poses])
    ok_(_worst <= float(tolerance), "Worst orthonormality error " + str(_worst))


@given("a straight 30 m flight over flat pavement with 0.5 pixels of noise and normals 0.1 degrees off")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.sequence = simulate_sequence(small_scene(trajectory_length=30.0, extent_x=40.0, landmark_count=5000,
                                                     frame_rate=30.0, noise_px=0.5, normal_noise_deg=0.1, seed=11))


@when("the estimator is run on the sequence with and without normal factors")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.results = dict((_curr, run_sequence(context.sequence.frames, context.sequence.intrinsics,
                                                SolverConfig().with_normal_weight(_curr)))
                           for _curr in [1e4, 0.0])


def tilt_errors(_records, _sequence):
    """Per frame, the angle between the estimated and the true pavement normal in the camera frame"""
    _n_w = _sequence.plane_normal
    return np.array([math.acos(min(1.0, float(np.dot(_curr.pose.R @ _n_w, _sequence.poses[_curr.frame_id].R @ _n_w))))
                     for _curr in _records])


@then("the normal factors lowered the mean rotation error about the in-plane axes")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _with = float(np.mean(tilt_errors(context.results[1e4].poses, context.sequence)))
    _without = float(np.mean(tilt_errors(context.results[0.0].poses, context.sequence)))
    ok_(_with < _without, "Mean tilt error " + str(_with) + " with normal factors, " + str(_without) + " without")
