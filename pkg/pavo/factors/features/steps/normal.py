import numpy as np
from behave import *
from nose.tools.trivial import ok_

from pavo.factors.normal import make_tangent_basis, normal_residual, normal_jacobian, normal_pose_jacobian, \
    check_frame_normal, check_global_normal
from pavo.geometry.lie import PoseSE3, apply_update, exp_rotation, random_rotation

use_step_matcher("re")

_named_rotations = {"the identity rotation": np.eye(3),
                    "a 0.1 radian rotation about x": exp_rotation([0.1, 0.0, 0.0])}


def vector(_text):
    return np.array([float(_curr) for _curr in _text.split(",")])


def random_unit(_rng, _negative_z=False):
    _n = _rng.normal(size=3)
    _n /= np.linalg.norm(_n)
    if _negative_z and _n[2] > 0:
        _n = -_n
    return _n


def random_case(_rng):
    """(B_k, R_k, n_w, n_k), n_w of random length"""
    _n_k = random_unit(_rng, _negative_z=True)
    return make_tangent_basis(_n_k), random_rotation(_rng), random_unit(_rng) * _rng.uniform(0.2, 5.0), _n_k


def relative_error(_analytic, _numeric):
    return np.linalg.norm(_analytic - _numeric) / max(np.linalg.norm(_numeric), 1.0)


@when("the tangent basis of (?P<normal>.*) is made")
def step_impl(context, normal):
    """
    :type context: behave.runner.Context
    """
    context.basis = make_tangent_basis(vector(normal))


@then("its rows are (?P<b0>.*) and (?P<b1>.*)")
def step_impl(context, b0, b1):
    """
    :type context: behave.runner.Context
    """
    ok_(np.allclose(context.basis, np.array([vector(b0), vector(b1)]), rtol=0, atol=1e-15), str(context.basis))


@then("the rows of (?P<count>\\d+) random tangent bases are orthonormal and orthogonal to their normal "
      "within (?P<tolerance>.*)")
def step_impl(context, count, tolerance):
    """
    :type context: behave.runner.Context
    """
    _worst = 0.0
    for _curr in range(int(count)):
        _n = random_unit(context.rng)
        _B = make_tangent_basis(_n)
        _worst = max(_worst, float(np.max(np.abs(_B @ _B.T - np.eye(2)))), float(np.max(np.abs(_B @ _n))))
    ok_(_worst <= float(tolerance), "Worst deviation " + str(_worst))


@then("tangent bases are deterministic")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _n = random_unit(context.rng)
    ok_(np.array_equal(make_tangent_basis(_n), make_tangent_basis(_n.copy())))


@when("the normal residual of (?P<rotation>.*), n_w = (?P<n_w>.*) and n_k = (?P<n_k>.*) is computed")
def step_impl(context, rotation, n_w, n_k):
    """
    :type context: behave.runner.Context
    """
    _n_k = vector(n_k)
    context.residual = normal_residual(make_tangent_basis(_n_k), _named_rotations[rotation], vector(n_w), _n_k)


@then("the normal residual is (?P<residual>.*)")
def step_impl(context, residual):
    """
    :type context: behave.runner.Context
    """
    ok_(np.allclose(context.residual, vector(residual), rtol=0, atol=1e-12), str(context.residual))


@then("on (?P<count>\\d+) random cases the normal residual is invariant to the length of n_w "
      "within (?P<tolerance>.*)")
def step_impl(context, count, tolerance):
    """
    :type context: behave.runner.Context
    """
    _worst = 0.0
    for _curr in range(int(count)):
        _B, _R, _n_w, _n_k = random_case(context.rng)
        _scale = context.rng.uniform(0.1, 10.0)
        _worst = max(_worst, float(np.max(np.abs(normal_residual(_B, _R, _n_w, _n_k) -
                                                 normal_residual(_B, _R, _scale * _n_w, _n_k)))))
    ok_(_worst <= float(tolerance), "Worst difference " + str(_worst))


@then("on (?P<count>\\d+) random cases the normal residual annihilates the component along n_k "
      "within (?P<tolerance>.*)")
def step_impl(context, count, tolerance):
    """
    :type context: behave.runner.Context
    """
    _worst = 0.0
    for _curr in range(int(count)):
        _B, _R, _n_w, _n_k = random_case(context.rng)
        # R n_w / |n_w| is +n_k or -n_k, the difference to n_k is parallel to n_k
        _sign = 1.0 if _curr % 2 == 0 else -1.0
        _parallel = _sign * context.rng.uniform(0.2, 5.0) * (_R.T @ _n_k)
        _worst = max(_worst, float(np.max(np.abs(normal_residual(_B, _R, _parallel, _n_k)))))
    ok_(_worst <= float(tolerance), "Worst residual " + str(_worst))


@then("the normal Jacobians match central finite differences on (?P<count>\\d+) random configurations")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    _h = context.step
    _worst_pose, _worst_normal = 0.0, 0.0
    for _curr in range(int(count)):
        _B, _R, _n_w, _n_k = random_case(context.rng)
        _pose = PoseSE3(_R, context.rng.uniform(-5.0, 5.0, 3))
        _J_pose = normal_pose_jacobian(_B, _R, _n_w)
        _, _J_nw = normal_jacobian(_B, _R, _n_w)
        _numeric_pose = np.zeros((2, 6))
        for _i in range(6):
            _xi = np.zeros(6)
            _xi[_i] = _h
            _numeric_pose[:, _i] = (normal_residual(_B, apply_update(_xi, _pose).R, _n_w, _n_k) -
                                    normal_residual(_B, apply_update(-_xi, _pose).R, _n_w, _n_k)) / (2 * _h)
        _numeric_normal = np.zeros((2, 3))
        for _i in range(3):
            _dn = np.zeros(3)
            _dn[_i] = _h
            _numeric_normal[:, _i] = (normal_residual(_B, _R, _n_w + _dn, _n_k) -
                                      normal_residual(_B, _R, _n_w - _dn, _n_k)) / (2 * _h)
        _worst_pose = max(_worst_pose, relative_error(_J_pose, _numeric_pose))
        _worst_normal = max(_worst_normal, relative_error(_J_nw, _numeric_normal))
    ok_(_worst_pose <= 1e-5, "Worst relative error of the pose Jacobian " + str(_worst_pose))
    ok_(_worst_normal <= 1e-5, "Worst relative error of the global normal Jacobian " + str(_worst_normal))


@then("the normal factor does not depend on the translation and has rank 2")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in range(100):
        _B, _R, _n_w, _n_k = random_case(context.rng)
        _J = normal_pose_jacobian(_B, _R, _n_w)
        ok_(np.array_equal(_J[:, :3], np.zeros((2, 3))), str(_J))
        ok_(np.linalg.matrix_rank(_J) == 2, str(_J))


@then("frame normals that are not unit length or point away from the camera are refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in [[0.0, 0.0, -2.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]:
        try:
            check_frame_normal(_curr)
            ok_(False, "Accepted " + str(_curr))
        except ValueError:
            pass
    ok_(np.array_equal(check_frame_normal([0.0, 0.0, -1.0]), [0.0, 0.0, -1.0]))


@then("a global normal of zero length is refused")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    try:
        check_global_normal([0.0, 0.0, 0.0])
        ok_(False, "A zero global normal was accepted")
    except ValueError:
        pass
