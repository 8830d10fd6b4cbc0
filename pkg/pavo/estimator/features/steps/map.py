import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.estimator.map import MapState, Keyframe, Landmark
from pavo.geometry.lie import PoseSE3

use_step_matcher("re")


def refused(_function, *args):
    try:
        _function(*args)
        return False
    except (KeyError, ValueError):
        return True


@given("keyframe 1 observing landmarks 0 to 39 and keyframe 2 observing landmarks 10 to 39")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _map = MapState()
    for _curr in [1, 2]:
        _map.add_keyframe(Keyframe(_curr, PoseSE3.identity(), _fixed=_curr == 1))
    for _curr in range(40):
        _map.add_landmark(Landmark(_curr, [float(_curr), 0.0, 5.0]))
        _map.add_observation(MapState.make_observation(1, _curr, [330.0, 240.0, 326.0], 1.0))
        if _curr >= 10:
            _map.add_observation(MapState.make_observation(2, _curr, [330.0, 240.0, 326.0], 1.0))
    context.map = _map


@then("keyframes (?P<a>\\d+) and (?P<b>\\d+) share (?P<count>\\d+) landmarks")
def step_impl(context, a, b, count):
    """
    :type context: behave.runner.Context
    """
    ok_(context.map.shared_count(int(a), int(b)) == int(count), str(context.map.covisibility))
    ok_(context.map.shared_count(int(b), int(a)) == int(count), str(context.map.covisibility))


@then("keyframe 2 is covisible with keyframe 1 at 15 shared landmarks but not at 31")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.map.covisible(1, 15) == [2])
    ok_(context.map.covisible(1, 31) == [])


@then("the covisibility graph at 15 shared landmarks is 1, 2, 30")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.map.edges(15) == [(1, 2, 30)], str(context.map.edges(15)))


@then("the map is consistent")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _problems = context.map.check_consistency()
    ok_(_problems == [], str(_problems))


@when("keyframe (?P<kf_id>\\d+) no longer observes landmark (?P<lm_id>\\d+)")
def step_impl(context, kf_id, lm_id):
    """
    :type context: behave.runner.Context
    """
    context.deleted = context.map.remove_observation(int(kf_id), int(lm_id))


@then("landmark (?P<lm_id>\\d+) is still in the map")
def step_impl(context, lm_id):
    """
    :type context: behave.runner.Context
    """
    ok_(not context.deleted and int(lm_id) in context.map.landmarks)
    ok_(context.map.landmarks[int(lm_id)].observers == {1})


@then("landmark (?P<lm_id>\\d+) is deleted")
def step_impl(context, lm_id):
    """
    :type context: behave.runner.Context
    """
    ok_(context.deleted and int(lm_id) not in context.map.landmarks)


@then("adding keyframe 1 again is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(refused(context.map.add_keyframe, Keyframe(1, PoseSE3.identity())))


@then("observing landmark 0 twice from keyframe 1 is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(refused(context.map.add_observation, MapState.make_observation(1, 0, [330.0, 240.0, 326.0], 1.0)))
    ok_(context.map.check_consistency() == [])


@then("observing a landmark that is not in the map is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(refused(context.map.add_observation, MapState.make_observation(1, 1000, [330.0, 240.0, 326.0], 1.0)))


@when("a snapshot is taken and the map is changed")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.snapshot = context.map.snapshot()
    context.map.remove_observation(2, 30)
    context.map.landmarks[31].position[0] = -1.0
    context.map.global_normal = np.array([0.0, 0.0, 1.0])


@then("the snapshot is unchanged")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(context.snapshot.shared_count(1, 2) == 30)
    ok_(context.snapshot.landmarks[31].position[0] == 31.0)
    ok_(context.snapshot.global_normal is None)
    ok_(context.snapshot.check_consistency() == [])
    ok_(context.snapshot.lock is not context.map.lock)
