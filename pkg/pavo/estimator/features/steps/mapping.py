import math

import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.estimator.config import SolverConfig, InsufficientKeyframes
from pavo.estimator.mapping import local_bundle_adjustment, local_scope, reject_outliers, insert_keyframe, \
    cull_landmarks
from pavo.geometry.lie import PoseSE3
from pavo.simulator.sequence import simulate_sequence
from pavo.testing.builders import small_scene, map_at_ground_truth, move_landmarks_to_ground_truth, \
    single_observation_map, pose_difference

use_step_matcher("re")

# Simulated sequences by description, they are expensive to make
_sequences = {}


def cached_sequence(_description, **kwargs):
    if _description not in _sequences:
        _sequences[_description] = simulate_sequence(small_scene(**kwargs))
    return _sequences[_description]


def build_map(context, _frames, _config):
    context.solver_config = _config
    context.map = map_at_ground_truth(context.sequence, [int(_curr) for _curr in _frames.split(",")], _config)
    context.poses_before = dict((_curr.id, _curr.pose) for _curr in context.map.keyframes.values())
    context.keys_before = set(context.map.observations)
    context.positions_before = dict((_curr.id, np.array(_curr.position)) for _curr in context.map.landmarks.values())


@given("the noiseless small scene")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.sequence = cached_sequence("noiseless")


@given("the small scene with 0.5 pixels of noise and 5% of the observations displaced by 50 pixels")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.sequence = cached_sequence("noisy", noise_px=0.5, outlier_rate=0.05, outlier_px=50.0)


@when("a map is built from frames? (?P<frames>[\\d, ]+) with a normal initialization window of (?P<window>\\d+)")
def step_impl(context, frames, window):
    """
    :type context: behave.runner.Context
    """
    build_map(context, frames, SolverConfig(normal_init_window=int(window)))


@when("a map is built from frames? (?P<frames>[\\d, ]+) with a local window of (?P<window>\\d+)")
def step_impl(context, frames, window):
    """
    :type context: behave.runner.Context
    """
    build_map(context, frames, SolverConfig(local_window=int(window)))


@when("a map is built from frames? (?P<frames>[\\d, ]+)")
def step_impl(context, frames):
    """
    :type context: behave.runner.Context
    """
    build_map(context, frames, SolverConfig())


@when("every keyframe is fixed and the global normal countdown has run out")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in context.map.keyframes.values():
        _curr.fixed = True
    context.map.normal_init_remaining = 0
    context.global_normal_before = np.array(context.map.global_normal)


@when("every landmark is moved by 1 cm in a random direction")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    move_landmarks_to_ground_truth(context.map, context.sequence)
    for _curr in context.map.landmarks.values():
        _direction = context.rng.normal(size=3)
        _curr.position = _curr.position + 0.01 * _direction / np.linalg.norm(_direction)


@when("every landmark is moved to the ground truth")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    move_landmarks_to_ground_truth(context.map, context.sequence)


@when("the map is bundle adjusted around keyframe (?P<kf_id>\\d+)")
def step_impl(context, kf_id):
    """
    :type context: behave.runner.Context
    """
    context.scope = local_scope(context.map, int(kf_id), context.solver_config)
    context.report = local_bundle_adjustment(context.map, int(kf_id), context.sequence.intrinsics,
                                             context.solver_config)


@then("keyframe 0 is fixed at the identity")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.map.keyframes[0].fixed and context.map.keyframes[0].pose == PoseSE3.identity())


@then("the global normal is the normal measured in frame 0")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(np.allclose(context.map.global_normal, context.sequence.frames[0].normal, rtol=0, atol=1e-15),
        str(context.map.global_normal))


@then("every observation of frame 0 with a usable disparity made a landmark")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _frame = context.sequence.frames[0]
    _usable = _frame.landmark_ids[_frame.disparities > context.solver_config.min_disparity]
    ok_(set(context.map.landmarks) == set(_usable.tolist()))
    ok_(context.map.keyframes[0].reference_count == len(_usable))


@then("(?P<count>\\d+) keyframes are left to optimize the global normal")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    ok_(context.map.normal_init_remaining == int(count), str(context.map.normal_init_remaining))


@then("covisibility is kept between keyframes 0 and 6 in a consistent map")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.map.check_consistency() == [], str(context.map.check_consistency()))
    ok_(context.map.shared_count(0, 6) > 15, str(context.map.shared_count(0, 6)))


@then("the final cost is below (?P<cost>.*) after at most (?P<iterations>\\d+) iterations")
def step_impl(context, cost, iterations):
    """
    :type context: behave.runner.Context
    """
    ok_(context.report.final_cost < float(cost), str(context.report))
    ok_(context.report.iterations <= int(iterations), str(context.report))


@then("no keyframe moved more than (?P<tolerance>.*)")
def step_impl(context, tolerance):
    """
    :type context: behave.runner.Context
    """
    for _curr_id, _curr_pose in context.poses_before.items():
        _angle, _distance = pose_difference(context.map.keyframes[_curr_id].pose, _curr_pose)
        ok_(_angle <= float(tolerance) and _distance <= float(tolerance), str((_curr_id, _angle, _distance)))
    ok_(context.map.keyframes[0].pose == PoseSE3.identity())


@then("4 keyframes were optimized, 1 was fixed and the global normal was optimized")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.report.optimized_keyframes == 4 and context.report.fixed_keyframes == 1, str(context.report))
    ok_(context.report.global_normal_optimized, str(context.report))


@then("no observations were rejected")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.report.removed_observations == 0 and set(context.map.observations) == context.keys_before)


@then("the adjusted landmarks are within (?P<tolerance>.*) of the ground truth")
def step_impl(context, tolerance):
    """
    :type context: behave.runner.Context
    """
    _, _, _landmark_ids = context.scope
    ok_(len(_landmark_ids) > 100, str(len(_landmark_ids)))
    _worst = max([np.linalg.norm(context.map.landmarks[_curr].position - context.sequence.landmarks[_curr])
                  for _curr in _landmark_ids])
    ok_(_worst <= float(tolerance), "Worst landmark error " + str(_worst))


@then("the keyframes kept their poses exactly")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr_id, _curr_pose in context.poses_before.items():
        ok_(context.map.keyframes[_curr_id].pose == _curr_pose, "Keyframe " + str(_curr_id) + " moved")


@then("the global normal did not change")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(np.array_equal(context.map.global_normal, context.global_normal_before), str(context.map.global_normal))
    ok_(not context.report.global_normal_optimized)


@then("bundle adjusting around keyframe 0 fails with InsufficientKeyframes")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        local_bundle_adjustment(context.map, 0, context.sequence.intrinsics, context.solver_config)
        ok_(False, "Bundle adjustment with one keyframe did not fail")
    except InsufficientKeyframes:
        pass


@given("a single observation with a squared reprojection error of (?P<chi2>.*)")
def step_impl(context, chi2):
    """
    :type context: behave.runner.Context
    """
    # (0, 0, 2) projects to (320, 240, 310) at the identity
    context.map = single_observation_map([0.0, 0.0, 2.0], [320.0 - math.sqrt(float(chi2)), 240.0, 310.0])


@when("the outliers of the map are rejected")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.removed = reject_outliers(context.map, context.K, SolverConfig())


@then("(?P<count>\\d+) observations were removed")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    ok_(context.removed == int(count), str(context.removed))
    ok_(len(context.map.observations) == 1 - int(count) and len(context.map.landmarks) == 1 - int(count))


@then("at least (?P<share>\\d+)% of the displaced observations were removed")
def step_impl(context, share):
    """
    :type context: behave.runner.Context
    """
    _displaced = set()
    for _curr_id in context.map.keyframes:
        _frame = context.sequence.frames[_curr_id]
        _displaced.update([(_curr_id, _curr_lm) for _curr_lm in _frame.landmark_ids[_frame.is_outlier].tolist()])
    context.displaced_keys = _displaced & context.keys_before
    context.removed_keys = context.keys_before.difference(context.map.observations)
    ok_(len(context.displaced_keys) > 50, str(len(context.displaced_keys)))
    _found = len(context.displaced_keys & context.removed_keys) / len(context.displaced_keys)
    ok_(_found >= int(share) / 100.0, "Removed " + str(_found) + " of the displaced observations")
    ok_(context.report.removed_observations == len(context.removed_keys), str(context.report))


@then("at most (?P<share>\\d+)% of the other observations were removed")
def step_impl(context, share):
    """
    :type context: behave.runner.Context
    """
    _others = context.keys_before.difference(context.displaced_keys)
    _lost = len(_others & context.removed_keys) / len(_others)
    ok_(_lost <= int(share) / 100.0, "Removed " + str(_lost) + " of the other observations")


@then("the landmarks are closer to the ground truth than their triangulations")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _ids = [_curr for _curr in context.scope[2] if _curr in context.map.landmarks]
    _before = np.median([np.linalg.norm(context.positions_before[_curr] - context.sequence.landmarks[_curr])
                         for _curr in _ids])
    _after = np.median([np.linalg.norm(context.map.landmarks[_curr].position - context.sequence.landmarks[_curr])
                        for _curr in _ids])
    ok_(_after < 0.5 * _before, "Median landmark error " + str(_before) + " -> " + str(_after))


@when("frame (?P<frame_id>\\d+) is inserted as a keyframe with every observation rejected by tracking")
def step_impl(context, frame_id):
    """
    :type context: behave.runner.Context
    """
    _frame = context.sequence.frames[int(frame_id)]
    context.observers_before = dict((_curr.id, set(_curr.observers)) for _curr in context.map.landmarks.values())
    insert_keyframe(context.map, _frame, context.sequence.poses[int(frame_id)], np.zeros(len(_frame), dtype=bool),
                    context.sequence.intrinsics, context.solver_config)


@then("keyframe (?P<kf_id>\\d+) observes every landmark it sees that had fewer than two observers")
def step_impl(context, kf_id):
    """
    :type context: behave.runner.Context
    """
    _keyframe = context.map.keyframes[int(kf_id)]
    _seen = context.sequence.frames[int(kf_id)].landmark_ids.tolist()
    _young = [_curr for _curr in _seen if len(context.observers_before.get(_curr, [None, None])) < 2]
    _mature = [_curr for _curr in _seen if len(context.observers_before.get(_curr, [])) >= 2]
    ok_(len(_young) > 100, str(len(_young)))
    ok_(all([_curr in _keyframe.observations for _curr in _young]))
    ok_(not any([_curr in _keyframe.observations for _curr in _mature]))
    ok_(context.map.check_consistency() == [], str(context.map.check_consistency()))


@then("the reference counts leave out the rejected observations")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr_id in [2, 4]:
        _keyframe = context.map.keyframes[_curr_id]
        _new = [_curr for _curr in _keyframe.observations if context.map.landmarks[_curr].created_at ==
                list(context.map.keyframes).index(_curr_id) + 1]
        ok_(_keyframe.reference_count == len(_new) < len(_keyframe.observations),
            str((_curr_id, _keyframe.reference_count, len(_new), len(_keyframe.observations))))


@when("the landmarks are culled")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.observers_before = dict((_curr.id, set(_curr.observers)) for _curr in context.map.landmarks.values())
    context.culled = cull_landmarks(context.map, context.solver_config)


@then("every landmark of keyframe 0 without a second observer was deleted")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _lonely = [_curr for _curr, _observers in context.observers_before.items() if _observers == {0}]
    ok_(len(_lonely) > 0 and context.culled == len(_lonely), str((len(_lonely), context.culled)))
    ok_(not any([_curr in context.map.landmarks for _curr in _lonely]))
    ok_(all([(0, _curr) not in context.map.observations for _curr in _lonely]))


@then("the single-observer landmarks of keyframes 10 and 20 were kept")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _kept = [_curr for _curr, _observers in context.observers_before.items() if _observers in ({10}, {20})]
    ok_(len(_kept) > 0, str(len(_kept)))
    ok_(all([_curr in context.map.landmarks for _curr in _kept]))
    ok_(len(context.map.landmarks) == len(context.observers_before) - context.culled)


@then("keyframe 0 kept the identity bit for bit while the others moved")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _first = context.map.keyframes[0].pose
    ok_(np.array_equal(_first.R, np.eye(3)) and np.array_equal(_first.t, np.zeros(3)), str(_first))
    ok_(context.report.optimized_keyframes == len(context.map.keyframes) - 1, str(context.report))
    ok_(any([context.map.keyframes[_curr_id].pose != _curr_pose
             for _curr_id, _curr_pose in context.poses_before.items()]))
