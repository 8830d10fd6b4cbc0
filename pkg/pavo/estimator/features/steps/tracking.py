import dataclasses

import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.estimator.config import SolverConfig, TrackingLost
from pavo.estimator.frame import FrameObservations
from pavo.estimator.map import MapState, Landmark, Keyframe
from pavo.estimator.tracking import predict_pose, track_frame, select_keyframe
from pavo.geometry.lie import PoseSE3, apply_update
from pavo.testing.builders import random_pose, planar_landmarks, perturbation, pose_difference

use_step_matcher("re")


@then("without history the predicted pose is the identity")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(predict_pose([]) == PoseSE3.identity())


@then("with one previous pose the prediction is that pose")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _pose = random_pose(context.rng)
    ok_(predict_pose([_pose]) == _pose)


@then("after poses 0, 0, 0 and 0.1, 0, 0 the predicted position is 0.2, 0, 0")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _predicted = predict_pose([PoseSE3.identity(), PoseSE3(np.eye(3), [0.1, 0.0, 0.0])])
    ok_(np.allclose(_predicted.t, [0.2, 0.0, 0.0], rtol=0, atol=1e-15), str(_predicted))
    ok_(np.allclose(_predicted.R, np.eye(3), rtol=0, atol=1e-15), str(_predicted))


@given("(?P<count>\\d+) mapped landmarks near a plane 5 m in front of a random pose")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    context.true_pose = random_pose(context.rng, _max_angle=1.0, _max_translation=2.0)
    context.positions, context.pixels = planar_landmarks(context.rng, context.true_pose, _count=int(count))
    context.map = MapState()
    for _curr, _curr_position in enumerate(context.positions):
        context.map.add_landmark(Landmark(_curr, _curr_position))
    context.solver_config = SolverConfig()


@given("a frame observing them without noise")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.frame = FrameObservations(frame_id=7, timestamp=0.7, landmark_ids=np.arange(len(context.pixels)),
                                      pixels=context.pixels)


@given("(?P<count>\\d+) of its observations displaced by (?P<pixels>\\d+) pixels")
def step_impl(context, count, pixels):
    """
    :type context: behave.runner.Context
    """
    context.displaced = context.rng.choice(len(context.frame), size=int(count), replace=False)
    _angles = context.rng.uniform(0.0, 2 * np.pi, int(count))
    # The same displacement in both images keeps the disparity
    context.frame.pixels[context.displaced, 0] += float(pixels) * np.cos(_angles)
    context.frame.pixels[context.displaced, 2] += float(pixels) * np.cos(_angles)
    context.frame.pixels[context.displaced, 1] += float(pixels) * np.sin(_angles)


@given("(?P<count>\\d+) further observations of landmarks that are not in the map")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    _extra = context.rng.uniform([100.0, 100.0, 0.0], [500.0, 400.0, 0.0], (int(count), 3))
    _extra[:, 2] = _extra[:, 0] - 4.0
    context.unmapped = np.arange(len(context.frame), len(context.frame) + int(count))
    context.frame = FrameObservations(frame_id=context.frame.frame_id, timestamp=context.frame.timestamp,
                                      landmark_ids=np.concatenate([context.frame.landmark_ids, 1000 + context.unmapped]),
                                      pixels=np.concatenate([context.frame.pixels, _extra]))


@when("the frame is tracked from the pose perturbed by (?P<norm>.*)")
def step_impl(context, norm):
    """
    :type context: behave.runner.Context
    """
    _start = apply_update(perturbation(context.rng, float(norm)), context.true_pose)
    context.result = track_frame(context.map, context.frame, [_start], context.K, context.solver_config)


@then("the tracked pose is within (?P<tolerance>.*) of the true pose")
def step_impl(context, tolerance):
    """
    :type context: behave.runner.Context
    """
    _angle, _distance = pose_difference(context.result.pose, context.true_pose)
    ok_(_angle < float(tolerance) and _distance < float(tolerance), str((_angle, _distance)))


@then("every observation is an inlier")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(np.all(context.result.inliers) and context.result.inlier_count == len(context.frame))


@then("exactly the displaced observations are outliers")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(sorted(np.nonzero(~context.result.inliers)[0].tolist()) == sorted(context.displaced.tolist()),
        str(np.nonzero(~context.result.inliers)[0]))


@then("the unmapped observations are neither matched nor inliers")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(not np.any(context.result.matched[context.unmapped]) and not np.any(context.result.inliers[context.unmapped]))
    ok_(context.result.matched_count == len(context.frame) - len(context.unmapped))


@then("tracking the frame fails with TrackingLost for its frame id")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        track_frame(context.map, context.frame, [context.true_pose], context.K, context.solver_config)
        ok_(False, "Tracking did not fail")
    except TrackingLost as e:
        ok_(e.frame_id == 7, str(e.frame_id))


@given("the last keyframe is (?P<kf_id>\\d+) with (?P<count>\\d+) observations")
def step_impl(context, kf_id, count):
    """
    :type context: behave.runner.Context
    """
    context.map = MapState()
    _keyframe = Keyframe(int(kf_id), PoseSE3.identity())
    _keyframe.reference_count = int(count)
    context.map.add_keyframe(_keyframe)


@then("frame (?P<frame>\\d+) with (?P<inliers>\\d+) inliers (?P<decision>is not|is) a keyframe")
def step_impl(context, frame, inliers, decision):
    """
    :type context: behave.runner.Context
    """
    _selected = select_keyframe(context.map, int(frame), int(inliers), SolverConfig())
    ok_(_selected == (decision == "is"), "Frame " + frame + " with " + inliers + " inliers: " + str(_selected))


@then("on an empty map any frame is a keyframe")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(select_keyframe(MapState(), 3, 0, SolverConfig()))


@given("the frame measures the normal of the plane, which is also the global normal")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    # The landmark plane faces the camera
    context.frame = dataclasses.replace(context.frame, normal=np.array([0.0, 0.0, -1.0]))
    context.map.global_normal = context.true_pose.R.T @ context.frame.normal


@then("tracking the frame against a zero global normal is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.map.global_normal = np.zeros(3)
    try:
        track_frame(context.map, context.frame, [context.true_pose], context.K, context.solver_config)
        ok_(False, "A zero global normal was accepted")
    except ValueError:
        pass
