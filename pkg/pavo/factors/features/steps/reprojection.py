import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.factors.reprojection import StereoObservation, reprojection_residual, reprojection_jacobians, \
    reprojection_residuals, reprojection_jacobians_many
from pavo.geometry.camera import project, NonPositiveDepth, GeometryError
from pavo.geometry.lie import PoseSE3, apply_update, transform_point
from pavo.testing.builders import random_pose

use_step_matcher("re")


def vector(_text):
    return np.array([float(_curr) for _curr in _text.split(",")])


def random_configuration(_rng):
    """A pose, a world landmark in front of it and a measurement near its projection"""
    _pose = random_pose(_rng, _max_translation=5.0)
    _camera = np.array([_rng.uniform(-3.0, 3.0), _rng.uniform(-3.0, 3.0), _rng.uniform(1.0, 20.0)])
    return _pose, transform_point(_pose.inverse(), _camera), _rng.uniform(0.0, 640.0, 3)


def relative_error(_analytic, _numeric):
    return np.linalg.norm(_analytic - _numeric) / max(np.linalg.norm(_numeric), 1.0)


@given("a random pose and a landmark in front of it")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.pose, context.landmark, _ = random_configuration(context.rng)


@given("the identity pose and the landmark (?P<landmark>.*)")
def step_impl(context, landmark):
    """
    :type context: behave.runner.Context
    """
    context.pose = PoseSE3.identity()
    context.landmark = vector(landmark)


@when("the landmark is observed at its projection")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.observation = project(context.K, transform_point(context.pose, context.landmark))


@when("the landmark is observed at the pixels (?P<pixels>.*)")
def step_impl(context, pixels):
    """
    :type context: behave.runner.Context
    """
    context.observation = StereoObservation(0, 0, *vector(pixels))


@then("the reprojection residual is zero")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _residual = reprojection_residual(context.K, context.pose, context.landmark, context.observation)
    ok_(np.array_equal(_residual, np.zeros(3)), str(_residual))


@then("the reprojection residual is (?P<residual>-?[\\d.]+, .*)")
def step_impl(context, residual):
    """
    :type context: behave.runner.Context
    """
    _residual = reprojection_residual(context.K, context.pose, context.landmark, context.observation)
    ok_(np.allclose(_residual, vector(residual), rtol=0, atol=1e-12), str(_residual))


@then("computing the reprojection residual raises NonPositiveDepth")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        reprojection_residual(context.K, context.pose, context.landmark, context.observation)
        ok_(False, "No error was raised")
    except NonPositiveDepth:
        pass


@then("the reprojection Jacobians match central finite differences on (?P<count>\\d+) random configurations")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    _h = context.step
    _worst_pose, _worst_point = 0.0, 0.0
    for _curr in range(int(count)):
        _pose, _point, _pixels = random_configuration(context.rng)
        _J_pose, _J_point = reprojection_jacobians(context.K, _pose, _point)
        _numeric_pose = np.zeros((3, 6))
        for _i in range(6):
            _xi = np.zeros(6)
            _xi[_i] = _h
            _numeric_pose[:, _i] = (reprojection_residual(context.K, apply_update(_xi, _pose), _point, _pixels) -
                                    reprojection_residual(context.K, apply_update(-_xi, _pose), _point, _pixels)) / \
                                   (2 * _h)
        _numeric_point = np.zeros((3, 3))
        for _i in range(3):
            _dp = np.zeros(3)
            _dp[_i] = _h
            _numeric_point[:, _i] = (reprojection_residual(context.K, _pose, _point + _dp, _pixels) -
                                     reprojection_residual(context.K, _pose, _point - _dp, _pixels)) / (2 * _h)
        _worst_pose = max(_worst_pose, relative_error(_J_pose, _numeric_pose))
        _worst_point = max(_worst_point, relative_error(_J_point, _numeric_point))
    ok_(_worst_pose <= 1e-5, "Worst relative error of the pose Jacobian " + str(_worst_pose))
    ok_(_worst_point <= 1e-5, "Worst relative error of the landmark Jacobian " + str(_worst_point))


@then("the vectorized reprojection residuals and Jacobians agree with the single observation versions")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _configurations = [random_configuration(context.rng) for _ in range(50)]
    _R = np.array([_curr[0].R for _curr in _configurations])
    _t = np.array([_curr[0].t for _curr in _configurations])
    _points = np.array([_curr[1] for _curr in _configurations])
    _pixels = np.array([_curr[2] for _curr in _configurations])
    _residuals, _pc, _valid = reprojection_residuals(context.K, _R, _t, _points, _pixels)
    _J_pose, _J_point = reprojection_jacobians_many(context.K, _R, _pc)
    ok_(np.all(_valid))
    for _curr, (_pose, _point, _pixel) in enumerate(_configurations):
        ok_(np.allclose(_residuals[_curr], reprojection_residual(context.K, _pose, _point, _pixel), atol=1e-9))
        _single_pose, _single_point = reprojection_jacobians(context.K, _pose, _point)
        ok_(np.allclose(_J_pose[_curr], _single_pose, atol=1e-9) and
            np.allclose(_J_point[_curr], _single_point, atol=1e-9))


@then("observations with uL not above uR or a non-positive weight are refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in [(300.0, 240.0, 300.0, 1.0), (300.0, 240.0, 310.0, 1.0), (310.0, 240.0, 300.0, 0.0)]:
        try:
            StereoObservation(0, 0, *_curr)
            ok_(False, "Accepted " + str(_curr))
        except GeometryError:
            pass
