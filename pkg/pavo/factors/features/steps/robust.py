import math

import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.factors.robust import huber, RobustLossConfig, chi2_3dof_95, chi2_2dof_95

use_step_matcher("re")


@when("the Huber loss of (?P<r>[^ ]+) is computed with the threshold (?P<delta>[^ ]+)")
def step_impl(context, r, delta):
    """
    :type context: behave.runner.Context
    """
    context.cost, context.weight = huber(float(r), float(delta))


@then("the cost is (?P<cost>[^ ]+) and the weight is (?P<weight>[^ ]+)")
def step_impl(context, cost, weight):
    """
    :type context: behave.runner.Context
    """
    ok_(abs(context.cost - float(cost)) < 1e-15, "Cost " + str(context.cost))
    ok_(abs(context.weight - float(weight)) < 1e-15, "Weight " + str(context.weight))


@then("the Huber loss is continuous and once differentiable at the threshold")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _delta in [0.5, 1.0, math.sqrt(chi2_3dof_95)]:
        _eps = 1e-7
        _at, _ = huber(_delta, _delta)
        _below, _ = huber(_delta - _eps, _delta)
        _above, _ = huber(_delta + _eps, _delta)
        ok_(abs(_at - _delta * _delta) < 1e-12, str(_at))
        # Both one-sided slopes are 2 delta
        ok_(abs((_at - _below) / _eps - 2 * _delta) < 1e-5, str((_at - _below) / _eps))
        ok_(abs((_above - _at) / _eps - 2 * _delta) < 1e-5, str((_above - _at) / _eps))


@then("the Huber loss of an array is computed element by element")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _cost, _weight = huber(np.array([0.5, 2.0, 4.0]), 1.0)
    ok_(np.allclose(_cost, [0.25, 3.0, 7.0]) and np.allclose(_weight, [1.0, 0.5, 0.25]), str((_cost, _weight)))


@then("a non-positive threshold is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        huber(1.0, 0.0)
        ok_(False, "A zero threshold was accepted")
    except ValueError:
        pass


@then("the default thresholds are the square roots of the 95% chi-square quantiles")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _config = RobustLossConfig()
    ok_(_config.delta_repro == math.sqrt(7.815) and chi2_3dof_95 == 7.815)
    ok_(_config.delta_normal == math.sqrt(chi2_2dof_95))
    ok_(_config.normal_weight == 1e4)


@then("a negative lambda is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        RobustLossConfig(normal_weight=-1.0)
        ok_(False, "A negative lambda was accepted")
    except ValueError:
        pass
    ok_(RobustLossConfig(normal_weight=0.0).normal_weight == 0.0)
