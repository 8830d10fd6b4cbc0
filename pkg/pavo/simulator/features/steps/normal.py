import math

import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.geometry.lie import random_rotation
from pavo.simulator.scene import estimate_frame_normal, perturb_normal, DegenerateCloud

use_step_matcher("re")

_grid = np.array([[_x, _y] for _x in np.linspace(-2.0, 2.0, 7) for _y in np.linspace(-1.5, 1.5, 5)])

#: Points on named planes, in a camera frame
_planes = {"z = 5": lambda: np.column_stack([_grid, np.full(len(_grid), 5.0)]),
           "x + z = 6": lambda: np.column_stack([_grid, 6.0 - _grid[:, 0]])}


def vector(_text):
    return np.array([float(_curr) for _curr in _text.split(",")])


def angle_between(_a, _b):
    return math.degrees(math.acos(min(1.0, float(np.dot(_a, _b)) / np.linalg.norm(_a) / np.linalg.norm(_b))))


def random_cloud(_rng, _scatter, _count=100):
    return np.column_stack([_rng.uniform(-2.0, 2.0, _count), _rng.uniform(-1.5, 1.5, _count),
                            5.0 + _rng.normal(0.0, 1.0, _count) * _scatter])


def refused(_points):
    try:
        estimate_frame_normal(_points)
        return False
    except DegenerateCloud:
        return True


@given("points on the plane (?P<plane>.*)")
def step_impl(context, plane):
    """
    :type context: behave.runner.Context
    """
    context.points = _planes[plane]()


@then("the fitted normal is (?P<normal>.*)")
def step_impl(context, normal):
    """
    :type context: behave.runner.Context
    """
    _normal, _planarity = estimate_frame_normal(context.points)
    ok_(np.allclose(_normal, vector(normal), rtol=0, atol=1e-12), str(_normal))
    ok_(_planarity < 1e-12, str(_planarity))


@then("on (?P<count>\\d+) random clouds the fitted normal of the rotated cloud is the rotated normal "
      "within (?P<tolerance>.*)")
def step_impl(context, count, tolerance):
    """
    :type context: behave.runner.Context
    """
    for _curr in range(int(count)):
        _points = random_cloud(context.rng, 0.01)
        _R = random_rotation(context.rng, 0.3)
        _normal, _ = estimate_frame_normal(_points)
        _rotated, _ = estimate_frame_normal(_points @ _R.T)
        ok_(np.allclose(_rotated, _R @ _normal, rtol=0, atol=float(tolerance)), str((_rotated, _R @ _normal)))


@then("on (?P<count>\\d+) random clouds with 1 cm of scatter the fitted normal is within (?P<degrees>.*) degrees")
def step_impl(context, count, degrees):
    """
    :type context: behave.runner.Context
    """
    _worst = max([angle_between(estimate_frame_normal(random_cloud(context.rng, 0.01))[0], [0.0, 0.0, -1.0])
                  for _ in range(int(count))])
    ok_(_worst < float(degrees), "Worst deviation " + str(_worst) + " degrees")


@then("fitting a plane to 2 points is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(refused([[0.0, 0.0, 5.0], [1.0, 0.0, 5.0]]))


@then("fitting a plane to collinear points is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _t = np.linspace(-1.0, 1.0, 20)
    ok_(refused(np.column_stack([_t, 2.0 * _t, 5.0 + 3.0 * _t])))


@then("perturbing a normal by (?P<sigma>.*) degrees (?P<count>\\d+) times keeps it unit length")
def step_impl(context, sigma, count):
    """
    :type context: behave.runner.Context
    """
    context.normal = np.array([0.0, 0.6, -0.8])
    context.perturbed = np.array([perturb_normal(context.normal, float(sigma), context.rng)
                                  for _ in range(int(count))])
    ok_(np.allclose(np.linalg.norm(context.perturbed, axis=1), 1.0, rtol=0, atol=1e-12))


@then("the angular deviations have an RMS of about (?P<rms>.*) degrees")
def step_impl(context, rms):
    """
    :type context: behave.runner.Context
    """
    # A rotation by a about a random axis tilts the normal by a sin(psi), E[sin^2 psi] = 2/3
    _deviations = np.array([angle_between(_curr, context.normal) for _curr in context.perturbed])
    _rms = math.sqrt(np.mean(_deviations ** 2))
    ok_(abs(_rms - float(rms)) < 0.1 * float(rms), "RMS " + str(_rms))


@then("perturbing by 0 degrees keeps the normal")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(np.array_equal(perturb_normal(context.normal, 0.0, context.rng), context.normal))
