import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.geometry.camera import project_many
from pavo.geometry.lie import transform_point
from pavo.simulator.sequence import simulate_sequence, frame_rng
from pavo.testing.builders import small_scene

use_step_matcher("re")


def frames_equal(_a, _b):
    return np.array_equal(_a.landmark_ids, _b.landmark_ids) and np.array_equal(_a.pixels, _b.pixels) and \
        np.array_equal(_a.is_outlier, _b.is_outlier) and np.array_equal(_a.normal, _b.normal) and \
        _a.timestamp == _b.timestamp


@given("the small scene with (?P<rate>\\d+)% of the observations displaced")
def step_impl(context, rate):
    """
    :type context: behave.runner.Context
    """
    context.scene_config = small_scene(noise_px=0.5, outlier_rate=int(rate) / 100.0)
    context.sequence = simulate_sequence(context.scene_config)


@given("the small scene")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.scene_config = small_scene()
    context.sequence = simulate_sequence(context.scene_config)


@then("simulating it again gives a bit-identical sequence")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _again = simulate_sequence(context.scene_config)
    ok_(len(_again.frames) == len(context.sequence.frames))
    ok_(all([frames_equal(_a, _b) for _a, _b in zip(_again.frames, context.sequence.frames)]))
    ok_(all([_a == _b for _a, _b in zip(_again.poses, context.sequence.poses)]))
    ok_(np.array_equal(_again.landmarks, context.sequence.landmarks))


@then("the generators of the frames do not depend on each other")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _first = frame_rng(42, 3).random(5)
    ok_(np.array_equal(_first, frame_rng(42, 3).random(5)))
    ok_(not np.array_equal(_first, frame_rng(42, 4).random(5)))
    ok_(not np.array_equal(_first, frame_rng(43, 3).random(5)))


@then("between (?P<low>\\d+)% and (?P<high>\\d+)% of the observations are labelled outliers")
def step_impl(context, low, high):
    """
    :type context: behave.runner.Context
    """
    _rate = context.sequence.outlier_count / context.sequence.observation_count
    ok_(int(low) / 100.0 <= _rate <= int(high) / 100.0, str(_rate))


@then("every pixel is the projection of its landmark at the ground truth pose")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr_frame, _curr_pose in zip(context.sequence.frames, context.sequence.poses):
        ok_(len(_curr_frame) > 100, str(len(_curr_frame)))
        _expected = project_many(context.sequence.intrinsics,
                                 transform_point(_curr_pose, context.sequence.landmarks[_curr_frame.landmark_ids]))
        ok_(np.allclose(_curr_frame.pixels, _expected, rtol=0, atol=1e-9), "Frame " + str(_curr_frame.frame_id))


@then("every frame normal is the pavement normal seen from that frame")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr_frame, _curr_pose in zip(context.sequence.frames, context.sequence.poses):
        _expected = _curr_pose.R @ context.sequence.plane_normal
        ok_(np.allclose(_curr_frame.normal, _expected, rtol=0, atol=1e-9),
            "Frame " + str(_curr_frame.frame_id) + ": " + str((_curr_frame.normal, _expected)))


@then("every frame has a planarity below (?P<tolerance>.*)")
def step_impl(context, tolerance):
    """
    :type context: behave.runner.Context
    """
    ok_(np.all(context.sequence.planarity < float(tolerance)), str(context.sequence.planarity))


@then("no observation is labelled an outlier")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.sequence.outlier_count == 0)
