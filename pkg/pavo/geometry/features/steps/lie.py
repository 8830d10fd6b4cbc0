import warnings

import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.geometry.lie import PoseSE3, NearPiRotation, exp, log, apply_update, transform_point, exp_rotation
from pavo.testing.builders import random_twist, random_pose

use_step_matcher("re")

_quarter_turn_z = np.array([[0.0, -1.0, 0.0],
                            [1.0, 0.0, 0.0],
                            [0.0, 0.0, 1.0]])

_named_poses = {"identity": PoseSE3.identity(),
                "quarter turn on z": PoseSE3(_quarter_turn_z),
                "translation 1 1 1": PoseSE3(t=[1.0, 1.0, 1.0])}

_named_rotations = {"identity": np.eye(3), "quarter turn on z": _quarter_turn_z}


def vector(_text):
    return np.array([float(_curr) for _curr in _text.split(",")])


@given('the pose "(?P<pose>.*)"')
def step_impl(context, pose):
    """
    :type context: behave.runner.Context
    """
    context.pose = _named_poses[pose]


@when("the point (?P<point>.*) is transformed")
def step_impl(context, point):
    """
    :type context: behave.runner.Context
    """
    context.result = transform_point(context.pose, vector(point))


@then("the transformed point is (?P<expected>.*)")
def step_impl(context, expected):
    """
    :type context: behave.runner.Context
    """
    ok_(np.allclose(context.result, vector(expected), rtol=0, atol=1e-15), str(context.result))


@when("the exponential of the twist (?P<twist>.*) is taken")
def step_impl(context, twist):
    """
    :type context: behave.runner.Context
    """
    context.pose = exp(vector(twist))


@then("the rotation is the (?P<rotation>.*) and the translation is (?P<translation>.*)")
def step_impl(context, rotation, translation):
    """
    :type context: behave.runner.Context
    """
    ok_(np.allclose(context.pose.R, _named_rotations[rotation], rtol=0, atol=1e-12), str(context.pose))
    ok_(np.allclose(context.pose.t, vector(translation), rtol=0, atol=1e-12), str(context.pose))


@then("the logarithm of the identity is the zero twist")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(np.array_equal(log(PoseSE3.identity()), np.zeros(6)))


@then("the logarithm of the exponential of (?P<twist>.*) gives back the twist")
def step_impl(context, twist):
    """
    :type context: behave.runner.Context
    """
    _xi = vector(twist)
    ok_(np.max(np.abs(log(exp(_xi)) - _xi)) <= 1e-9, str(log(exp(_xi))))


@then("a half turn about x is flagged and has a rotation angle of pi")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _pose = PoseSE3(np.diag([1.0, -1.0, -1.0]), [0.5, 0.0, 0.0])
    with warnings.catch_warnings(record=True) as _caught:
        warnings.simplefilter("always")
        _xi = log(_pose)
    ok_(any([issubclass(_curr.category, NearPiRotation) for _curr in _caught]), "No NearPiRotation warning")
    ok_(abs(np.linalg.norm(_xi[3:]) - np.pi) < 1e-9, str(_xi))
    ok_(abs(abs(_xi[3]) - np.pi) < 1e-9, "The axis is not x: " + str(_xi))
    # Either sign of the axis gives back the pose
    ok_(np.allclose(exp(_xi).matrix(), _pose.matrix(), atol=1e-9), str(exp(_xi)))


@then("(?P<count>\\d+) random twists with rotations up to (?P<angle>[\\d.]+) radians survive the round trip "
      "within (?P<tolerance>.*)")
def step_impl(context, count, angle, tolerance):
    """
    :type context: behave.runner.Context
    """
    _worst = 0.0
    for _curr in range(int(count)):
        _xi = random_twist(context.rng, float(angle), 2.0)
        _worst = max(_worst, float(np.max(np.abs(log(exp(_xi)) - _xi))))
    ok_(_worst <= float(tolerance), "Worst round trip error " + str(_worst))


@then("the zero update leaves a pose unchanged")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _pose = random_pose(context.rng)
    ok_(apply_update(np.zeros(6), _pose) == _pose)


@then("the update (?P<twist>.*) of the identity translates by 1 along x")
def step_impl(context, twist):
    """
    :type context: behave.runner.Context
    """
    _pose = apply_update(vector(twist), PoseSE3.identity())
    ok_(np.array_equal(_pose.R, np.eye(3)) and np.allclose(_pose.t, [1.0, 0.0, 0.0], rtol=0, atol=1e-15),
        str(_pose))


@then("an update is applied on the left")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _pose = random_pose(context.rng)
    _xi = random_twist(context.rng, 0.5, 0.5)
    ok_(np.allclose(apply_update(_xi, _pose).matrix(), exp(_xi).matrix() @ _pose.matrix(), rtol=0, atol=1e-12))


@then("a pose composed with its inverse is the identity")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in range(100):
        _pose = random_pose(context.rng)
        ok_(np.allclose(_pose.compose(_pose.inverse()).matrix(), np.eye(4), rtol=0, atol=1e-12))


@then("composition is associative")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _a, _b, _c = [random_pose(context.rng) for _ in range(3)]
    ok_(np.allclose(((_a @ _b) @ _c).matrix(), (_a @ (_b @ _c)).matrix(), rtol=0, atol=1e-12))


@then("the center of a pose is mapped to the origin")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _pose = random_pose(context.rng, _max_translation=10.0)
    ok_(np.allclose(transform_point(_pose, _pose.center()), np.zeros(3), rtol=0, atol=1e-12))


@then("quaternions give back the pose")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in range(100):
        _pose = random_pose(context.rng)
        _restored = PoseSE3.from_quaternion(_pose.t, _pose.as_quaternion())
        ok_(np.allclose(_restored.matrix(), _pose.matrix(), rtol=0, atol=1e-12))


@then("a matrix that is not a rotation is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in [np.diag([1.0, 1.0, -1.0]), 1.01 * np.eye(3), np.full((3, 3), np.nan)]:
        try:
            PoseSE3(_curr)
            ok_(False, "Accepted " + str(_curr))
        except ValueError:
            pass
    ok_(PoseSE3(exp_rotation([0.1, 0.2, 0.3])) is not None)


@then("poses can not be changed")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _pose = PoseSE3.identity()
    try:
        _pose.t = np.ones(3)
        ok_(False, "The translation was replaced")
    except AttributeError:
        pass
    try:
        _pose.t[0] = 1.0
        ok_(False, "The translation was written")
    except ValueError:
        pass


@then("a non-finite twist is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        exp([0.0, 0.0, np.inf, 0.0, 0.0, 0.0])
        ok_(False, "An infinite twist was accepted")
    except ValueError:
        pass


def orthonormality_error(_R):
    return float(max(np.max(np.abs(_R.T @ _R - np.eye(3))), abs(np.linalg.det(_R) - 1.0)))


@then("(?P<count>\\d+) constant velocity predictions of a rotating pose stay orthonormal within (?P<tolerance>.*)")
def step_impl(context, count, tolerance):
    """
    :type context: behave.runner.Context
    """
    _motion = exp(random_twist(context.rng, 0.05, 0.1))
    _before, _last = PoseSE3.identity(), _motion
    _worst = 0.0
    for _curr in range(int(count)):
        _before, _last = _last, _last.compose(_before.inverse()).compose(_last)
        _worst = max(_worst, orthonormality_error(_last.R))
    ok_(_worst <= float(tolerance), "Worst orthonormality error " + str(_worst))
    # Still accepted by the checking constructor
    ok_(PoseSE3(_last.R, _last.t) == _last)


@then("(?P<count>\\d+) chained small updates stay orthonormal within (?P<tolerance>.*)")
def step_impl(context, count, tolerance):
    """
    :type context: behave.runner.Context
    """
    _pose = random_pose(context.rng)
    _worst = 0.0
    for _curr in range(int(count)):
        _pose = apply_update(random_twist(context.rng, 0.1, 0.1), _pose)
        _worst = max(_worst, orthonormality_error(_pose.R))
    ok_(_worst <= float(tolerance), "Worst orthonormality error " + str(_worst))


@then("a rotation with rounding error is projected back onto a rotation when composed")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _R = exp_rotation([0.3, -0.2, 0.1])
    _off = _R + 2e-11 * context.rng.normal(size=(3, 3))
    _pose = PoseSE3(_off, [1.0, 2.0, 3.0])
    ok_(orthonormality_error(_pose.R) > 1e-12)
    _composed = _pose.compose(PoseSE3.identity())
    ok_(orthonormality_error(_composed.R) <= 1e-14, str(orthonormality_error(_composed.R)))
    ok_(np.allclose(_composed.R, _R, rtol=0, atol=1e-9))
    ok_(np.array_equal(_composed.t, _pose.t))
