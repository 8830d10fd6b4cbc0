import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.geometry.camera import Intrinsics, GeometryError, NonPositiveDepth, DegenerateDisparity, project, \
    project_many, triangulate

use_step_matcher("re")


def vector(_text):
    return np.array([float(_curr) for _curr in _text.split(",")])


@when("the camera frame point (?P<point>.*) is projected")
def step_impl(context, point):
    """
    :type context: behave.runner.Context
    """
    context.error = None
    try:
        context.measurement = project(context.K, vector(point))
    except GeometryError as e:
        context.error = e


@then("the measurement is (?P<measurement>.*)")
def step_impl(context, measurement):
    """
    :type context: behave.runner.Context
    """
    ok_(context.error is None, str(context.error))
    ok_(np.allclose(context.measurement, vector(measurement), rtol=0, atol=1e-12), str(context.measurement))


@then("projecting raises NonPositiveDepth")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(isinstance(context.error, NonPositiveDepth), str(context.error))


@when("the measurement (?P<measurement>.*) is triangulated")
def step_impl(context, measurement):
    """
    :type context: behave.runner.Context
    """
    context.error = None
    try:
        context.point = triangulate(context.K, vector(measurement))
    except GeometryError as e:
        context.error = e


@then("the triangulated point is (?P<point>.*)")
def step_impl(context, point):
    """
    :type context: behave.runner.Context
    """
    ok_(context.error is None, str(context.error))
    ok_(np.allclose(context.point, vector(point), rtol=0, atol=1e-12), str(context.point))


@then("triangulating raises DegenerateDisparity")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(isinstance(context.error, DegenerateDisparity), str(context.error))


def random_points(_rng, _count):
    # Beyond 30 m the disparity of the example camera drops below the triangulation threshold
    return np.stack([_rng.uniform(-5.0, 5.0, _count), _rng.uniform(-5.0, 5.0, _count),
                     _rng.uniform(0.5, 30.0, _count)], axis=1)


@then("(?P<count>\\d+) random points in front of the camera survive projection and triangulation "
      "within (?P<tolerance>[^ ]+) m")
def step_impl(context, count, tolerance):
    """
    :type context: behave.runner.Context
    """
    _worst = 0.0
    for _curr in random_points(context.rng, int(count)):
        _worst = max(_worst, float(np.max(np.abs(triangulate(context.K, project(context.K, _curr)) - _curr))))
    ok_(_worst <= float(tolerance), "Worst round trip error " + str(_worst))


@then("the vectorized projection agrees with the single point version")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _points = random_points(context.rng, 100)
    _measurements = project_many(context.K, _points)
    ok_(np.allclose(_measurements, np.array([project(context.K, _curr) for _curr in _points]), rtol=0, atol=1e-12))


@then("intrinsics with a non-positive focal length or baseline are refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in [(0.0, 400.0, 320.0, 240.0, 0.05), (400.0, -1.0, 320.0, 240.0, 0.05),
                  (400.0, 400.0, 320.0, 240.0, 0.0)]:
        try:
            Intrinsics(*_curr)
            ok_(False, "Accepted " + str(_curr))
        except GeometryError:
            pass
