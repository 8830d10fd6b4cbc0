"""
The normal module holds the surface normal factor. The difference between the global normal rotated into a
keyframe and the normal measured in that keyframe is projected onto the tangential plane of the measured
normal, giving a residual in R^2:

    e_k = B_k (R_k n_w / |n_w| - n_k)

B_k only depends on the measured normal, it is computed once per keyframe and kept through all iterations.

Created on Feb 3, 2016

@author: Nicklas Boerjesson
"""
import numpy as np

from pavo.geometry.lie import skew

__author__ = 'Nicklas Borjesson'

#: Tolerance of the unit norm check of frame normals
unit_tolerance = 1e-9
#: Global normals shorter than this cannot be normalized
min_global_norm = 1e-6

_seed_x = np.array([1.0, 0.0, 0.0])
_seed_y = np.array([0.0, 1.0, 0.0])


def check_frame_normal(n_k):
    """
    Validates a frame normal: unit length, pointing back toward the downward-looking camera (z < 0).

    :return: The normal as a float array
    """
    _n = np.asarray(n_k, dtype=float).reshape(3)
    if abs(np.linalg.norm(_n) - 1.0) > unit_tolerance:
        raise ValueError("check_frame_normal: Frame normal is not unit length: " + str(_n))
    if not _n[2] < 0:
        raise ValueError("check_frame_normal: Frame normal must have a negative z component: " + str(_n))
    return _n


def check_global_normal(n_w):
    _n = np.asarray(n_w, dtype=float).reshape(3)
    if not np.linalg.norm(_n) > min_global_norm:
        raise ValueError("check_global_normal: Global normal is too short to normalize: " + str(_n))
    return _n


def make_tangent_basis(n_k):
    """
    The two orthonormal rows spanning the plane orthogonal to n_k.
    The seed vector is x, or y when n_k is within about 25 degrees of x, so the result is deterministic.

    :param n_k: The unit frame normal
    :return: B_k, a 2 x 3 array
    """
    _n = np.asarray(n_k, dtype=float).reshape(3)
    _v = _seed_y if abs(np.dot(_n, _seed_x)) > 0.9 else _seed_x
    _b0 = np.cross(_n, _v)
    _b0 = _b0 / np.linalg.norm(_b0)
    _b1 = np.cross(_n, _b0)
    _b1 = _b1 / np.linalg.norm(_b1)
    return np.array([_b0, _b1])


def normal_residual(B_k, R_k, n_w, n_k):
    """
    The tangential normal residual B_k (R_k n_w / |n_w| - n_k).

    :param B_k: The 2 x 3 tangent basis of n_k
    :param R_k: The rotation of the keyframe pose
    :param n_w: The global (world frame) normal, any positive length
    :param n_k: The unit normal measured in the keyframe
    :return: A 2-vector
    """
    _n_w = np.asarray(n_w, dtype=float)
    return B_k @ (R_k @ (_n_w / np.linalg.norm(_n_w)) - np.asarray(n_k, dtype=float))


def normal_jacobian(B_k, R_k, n_w):
    """
    The analytic Jacobians of normal_residual. The residual does not depend on the translation of the pose.

    :return: (2 x 3 with respect to the rotational twist phi of exp(xi) * T at xi = 0,
              2 x 3 with respect to n_w)
    """
    _n_w = np.asarray(n_w, dtype=float)
    _norm = np.linalg.norm(_n_w)
    _unit = _n_w / _norm
    _J_phi = -B_k @ skew(R_k @ _unit)
    _J_nw = B_k @ R_k @ ((np.eye(3) - np.outer(_unit, _unit)) / _norm)
    return _J_phi, _J_nw


def normal_pose_jacobian(B_k, R_k, n_w):
    """The 2 x 6 Jacobian with respect to the full twist (rho, phi), the translation columns are zero"""
    _J_phi, _ = normal_jacobian(B_k, R_k, n_w)
    _result = np.zeros((2, 6))
    _result[:, 3:] = _J_phi
    return _result
