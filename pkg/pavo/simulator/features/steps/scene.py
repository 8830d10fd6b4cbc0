import math

import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.common.errors import ConfigError
from pavo.common.settings import RunConfig
from pavo.geometry.camera import project_many
from pavo.geometry.lie import PoseSE3
from pavo.simulator.config import SceneConfig
from pavo.simulator.scene import generate_scene, estimate_frame_normal, generate_trajectory, ground_rig, camera_at, \
    path_point, render_observations

use_step_matcher("re")


def vector(_text):
    return np.array([float(_curr) for _curr in _text.split(",")])


def angle_between(_a, _b):
    return math.degrees(math.acos(min(1.0, abs(float(np.dot(_a, _b))) / np.linalg.norm(_a) / np.linalg.norm(_b))))


def refused_naming(_key, **kwargs):
    try:
        SceneConfig(**kwargs)
        return False
    except ConfigError as e:
        return e.key == _key


@given("a scene of (?P<count>\\d+) landmarks with a roughness of (?P<roughness>.*)")
def step_impl(context, count, roughness):
    """
    :type context: behave.runner.Context
    """
    context.scene_config = SceneConfig(landmark_count=int(count), roughness=float(roughness), extent_x=12.0,
                                       extent_y=8.0, trajectory_shape="straight", trajectory_length=4.0, seed=3)
    context.scene = generate_scene(context.scene_config)


@given("a scene of (?P<count>\\d+) landmarks over (?P<x>.*) by (?P<y>.*) m with a roughness of (?P<roughness>.*)")
def step_impl(context, count, x, y, roughness):
    """
    :type context: behave.runner.Context
    """
    context.scene_config = SceneConfig(landmark_count=int(count), roughness=float(roughness), extent_x=float(x),
                                       extent_y=float(y), seed=3)
    context.scene = generate_scene(context.scene_config)


@then("every landmark is on the plane")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(np.all(context.scene.positions[:, 2] == context.scene_config.plane_height))
    ok_(np.array_equal(context.scene.plane_normal, [0.0, 0.0, 1.0]))


@then("the fitted normal of the landmarks is (?P<normal>.*) with a planarity below (?P<tolerance>.*)")
def step_impl(context, normal, tolerance):
    """
    :type context: behave.runner.Context
    """
    _normal, _planarity = estimate_frame_normal(context.scene.positions)
    ok_(np.allclose(_normal, vector(normal), rtol=0, atol=1e-12), str(_normal))
    ok_(_planarity < float(tolerance), str(_planarity))


@then("the fitted normal of the landmarks is within (?P<degrees>.*) degrees of (?P<normal>.*)")
def step_impl(context, degrees, normal):
    """
    :type context: behave.runner.Context
    """
    _normal, _ = estimate_frame_normal(context.scene.positions)
    ok_(angle_between(_normal, vector(normal)) < float(degrees), str(_normal))


@then("generating the scene again gives the same landmarks")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _again = generate_scene(context.scene_config)
    ok_(np.array_equal(_again.positions, context.scene.positions))
    ok_(np.array_equal(_again.landmark_ids, context.scene.landmark_ids))


@given("a straight flight of (?P<length>.*) m at (?P<speed>.*) m/s and (?P<rate>.*) frames per second")
def step_impl(context, length, speed, rate):
    """
    :type context: behave.runner.Context
    """
    context.scene_config = SceneConfig(trajectory_shape="straight", trajectory_length=float(length),
                                       speed=float(speed), frame_rate=float(rate))


@given("the default scene configuration")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.scene_config = SceneConfig()


@then("there are (?P<count>\\d+) frames")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    _timestamps, _poses = generate_trajectory(context.scene_config)
    ok_(context.scene_config.frame_count == int(count) and len(_poses) == int(count) and
        len(_timestamps) == int(count), str(len(_poses)))
    ok_(np.allclose(np.diff(_timestamps), 1.0 / context.scene_config.frame_rate, rtol=0, atol=1e-12))


@then("consecutive camera centers are 1/30 m apart")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _, _, _centers = ground_rig(context.scene_config)
    _spacing = np.linalg.norm(np.diff(_centers, axis=0), axis=1)
    ok_(np.allclose(_spacing, 1.0 / 30.0, rtol=0, atol=1e-12), str(_spacing))


@then("the first pose is the identity")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _, _poses = generate_trajectory(context.scene_config)
    ok_(_poses[0] == PoseSE3.identity())


@then("the camera looks down at the start")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _R, _center = camera_at(context.scene_config, 0.0)
    ok_(np.allclose(_R[:, 2], [0.0, 0.0, -1.0], rtol=0, atol=1e-15), str(_R))
    ok_(_center[2] == context.scene_config.plane_height + context.scene_config.altitude)


@then("the heading grows from 0 to pi without jumps along the path")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _s = np.linspace(0.0, context.scene_config.trajectory_length, 5001)
    _headings = np.array([path_point(context.scene_config, _curr)[2] for _curr in _s])
    ok_(_headings[0] == 0.0 and _headings[-1] == math.pi, str((_headings[0], _headings[-1])))
    _steps = np.diff(_headings)
    ok_(np.all(_steps >= 0.0), "The heading decreases")
    ok_(np.max(_steps) <= (_s[1] - _s[0]) / context.scene_config.turn_radius + 1e-9, str(np.max(_steps)))


@then("the path moves no further than its arc length")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _s = np.linspace(0.0, context.scene_config.trajectory_length, 5001)
    _points = np.array([path_point(context.scene_config, _curr)[:2] for _curr in _s])
    _steps = np.linalg.norm(np.diff(_points, axis=0), axis=1)
    ok_(np.all(_steps <= (_s[1] - _s[0]) * (1 + 1e-9)), str(np.max(_steps)))
    # The rows are row_spacing apart
    ok_(abs(_points[-1, 1] - _points[0, 1] - context.scene_config.row_spacing) < 1e-9, str(_points[-1]))


def render(context, _config):
    _R, _center = camera_at(_config, 0.0)
    _pose = PoseSE3(_R.T, -_R.T @ _center)
    # A few landmarks above the camera
    _above = np.array([[_center[0] + 0.5 * _curr, _center[1], _center[2] + 5.0] for _curr in range(-3, 4)])
    context.behind_ids = np.arange(100000, 100000 + len(_above))
    _ids = np.concatenate([context.scene.landmark_ids, context.behind_ids])
    _positions = np.concatenate([context.scene.positions, _above])
    context.render_config = _config
    context.rendered = render_observations(_ids, _positions, _pose, _config, context.rng)
    context.projections = project_many(_config.intrinsics(), context.rendered.camera_points)


@when("the landmarks are rendered from the first pose without noise")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    render(context, context.scene_config.with_changes(noise_px=0.0, outlier_rate=0.0))


@when("the landmarks are rendered from the first pose with (?P<rate>\\d+)% of the observations displaced by "
      "(?P<pixels>\\d+) pixels")
def step_impl(context, rate, pixels):
    """
    :type context: behave.runner.Context
    """
    render(context, context.scene_config.with_changes(noise_px=0.0, outlier_rate=int(rate) / 100.0,
                                                      outlier_px=float(pixels)))


@then("the pixels are the projections of the visible landmarks")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(len(context.rendered.landmark_ids) > 100, str(len(context.rendered.landmark_ids)))
    ok_(np.allclose(context.rendered.pixels, context.projections, rtol=0, atol=1e-12))
    ok_(not np.any(context.rendered.is_outlier))


@then("every pixel is inside the image")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _pixels = context.rendered.pixels
    ok_(np.all(_pixels[:, 0] >= 0) and np.all(_pixels[:, 0] < context.render_config.image_width))
    ok_(np.all(_pixels[:, 1] >= 0) and np.all(_pixels[:, 1] < context.render_config.image_height))
    ok_(np.all(_pixels[:, 2] >= 0) and np.all(_pixels[:, 0] > _pixels[:, 2]))


@then("landmarks behind the camera are not observed")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(not np.any(np.isin(context.rendered.landmark_ids, context.behind_ids)))
    ok_(np.all(context.rendered.camera_points[:, 2] > 0))


@then("the displaced pixels are (?P<pixels>\\d+) pixels from their projections with an unchanged disparity")
def step_impl(context, pixels):
    """
    :type context: behave.runner.Context
    """
    _outliers = context.rendered.is_outlier
    ok_(np.count_nonzero(_outliers) > 10, str(np.count_nonzero(_outliers)))
    _d = context.rendered.pixels[_outliers] - context.projections[_outliers]
    ok_(np.allclose(np.hypot(_d[:, 0], _d[:, 1]), float(pixels), rtol=0, atol=1e-9))
    ok_(np.allclose(_d[:, 0], _d[:, 2], rtol=0, atol=1e-9))


@then("the other pixels are their projections")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _inliers = ~context.rendered.is_outlier
    ok_(np.allclose(context.rendered.pixels[_inliers], context.projections[_inliers], rtol=0, atol=1e-12))


@then("a scene configuration with an outlier rate of 0.6 is refused naming outlier_rate")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(refused_naming("outlier_rate", outlier_rate=0.6))


@then("a lawn-mower sweep too short for its turns is refused naming trajectory_length")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(refused_naming("trajectory_length", trajectory_shape="lawnmower", trajectory_length=5.0))


@then("the scene configuration of the default run configuration is the default scene configuration")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(SceneConfig.from_run_config(RunConfig()) == SceneConfig())
