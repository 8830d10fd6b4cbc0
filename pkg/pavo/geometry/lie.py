"""
The lie module holds the SE(3) kernel: poses, twists, the exponential and logarithm maps and the
left-multiplicative pose update.

Twists are ordered (translation, rotation): xi = (rho_x, rho_y, rho_z, phi_x, phi_y, phi_z), rotation in radians.
All Jacobians in pavo follow this ordering.

Created on Feb 2, 2016

@author: Nicklas Boerjesson
"""
import warnings

import numpy as np
from scipy.spatial.transform import Rotation

__author__ = 'Nicklas Borjesson'

#: Below this rotation angle, exp falls back to a second order Taylor expansion
small_angle = 1e-8
#: Within this distance of pi, log uses the symmetric part of the rotation and flags the result
near_pi = 1e-6
#: Tolerance of the rotation matrix checks
orthonormal_tolerance = 1e-9
#: Products and exponentials further than this from orthonormal are projected back onto SO(3)
reorthonormalize_tolerance = 1e-12


class NearPiRotation(RuntimeWarning):
    """log was asked for a rotation within near_pi of pi, the axis sign is ambiguous there"""
    pass


def skew(_v):
    """The 3x3 cross product matrix of a 3-vector, skew(a) @ b == cross(a, b)"""
    return np.array([[0.0, -_v[2], _v[1]],
                     [_v[2], 0.0, -_v[0]],
                     [-_v[1], _v[0], 0.0]])


def orthonormalized(_R):
    """
    The closest rotation to _R in the Frobenius norm, U diag(1, 1, det(U V^T)) V^T of its SVD.
    Matrices within reorthonormalize_tolerance of orthonormal are returned as they are, so exact products stay exact.
    Rounding in long chains of compose and exp otherwise grows without bound, the constant velocity
    prediction roughly doubles it every frame.
    """
    if np.max(np.abs(_R.T @ _R - np.eye(3))) <= reorthonormalize_tolerance:
        return _R
    _U, _, _Vt = np.linalg.svd(_R)
    _D = np.diag([1.0, 1.0, np.sign(np.linalg.det(_U @ _Vt))])
    return _U @ _D @ _Vt


class PoseSE3(object):
    """
    A rigid transform T = [R | t] mapping world points into a camera frame: p_c = R p_w + t.
    Instances are treated as immutable, the arrays are made read-only.
    """
    __slots__ = ("R", "t")

    def __init__(self, R=None, t=None, _check=True):
        _R = np.eye(3) if R is None else np.array(R, dtype=float).reshape(3, 3)
        _t = np.zeros(3) if t is None else np.array(t, dtype=float).reshape(3)
        if _check:
            if not np.all(np.isfinite(_R)) or not np.all(np.isfinite(_t)):
                raise ValueError("PoseSE3: Non-finite pose")
            if np.max(np.abs(_R.T @ _R - np.eye(3))) > orthonormal_tolerance or \
                    abs(np.linalg.det(_R) - 1.0) > orthonormal_tolerance:
                raise ValueError("PoseSE3: R is not a rotation matrix:\n" + str(_R))
        _R.setflags(write=False)
        _t.setflags(write=False)
        object.__setattr__(self, "R", _R)
        object.__setattr__(self, "t", _t)

    def __setattr__(self, _name, _value):
        raise AttributeError("PoseSE3 is immutable")

    @staticmethod
    def identity():
        return PoseSE3()

    @staticmethod
    def from_quaternion(_translation, _quaternion):
        """From a translation and an (x, y, z, w) quaternion, which is normalized"""
        return PoseSE3(Rotation.from_quat(_quaternion).as_matrix(), _translation)

    def as_quaternion(self):
        """The rotation as an (x, y, z, w) quaternion"""
        return Rotation.from_matrix(self.R).as_quat()

    def matrix(self):
        """The 4x4 homogeneous matrix"""
        _result = np.eye(4)
        _result[:3, :3] = self.R
        _result[:3, 3] = self.t
        return _result

    def inverse(self):
        return PoseSE3(self.R.T, -self.R.T @ self.t, _check=False)

    def compose(self, _other):
        """self * _other, apply _other first"""
        return PoseSE3(orthonormalized(self.R @ _other.R), self.R @ _other.t + self.t, _check=False)

    def __matmul__(self, _other):
        return self.compose(_other)

    def center(self):
        """The origin of this frame expressed in the frame it maps from, -R^T t"""
        return -self.R.T @ self.t

    def __eq__(self, _other):
        return isinstance(_other, PoseSE3) and np.array_equal(self.R, _other.R) and np.array_equal(self.t, _other.t)

    def __hash__(self):
        return hash((self.R.tobytes(), self.t.tobytes()))

    def __repr__(self):
        return "PoseSE3(R=" + repr(self.R.tolist()) + ", t=" + repr(self.t.tolist()) + ")"


def transform_point(pose, p):
    """Maps p into the frame of pose: R p + t. p may also be an N x 3 array."""
    _p = np.asarray(p, dtype=float)
    if _p.ndim == 1:
        return pose.R @ _p + pose.t
    return _p @ pose.R.T + pose.t


def _rotation_coefficients(_theta):
    """A = sin(t)/t, B = (1 - cos(t))/t^2, C = (t - sin(t))/t^3, Taylor series below small_angle"""
    if _theta < small_angle:
        _theta2 = _theta * _theta
        return 1.0 - _theta2 / 6.0, 0.5 - _theta2 / 24.0, 1.0 / 6.0 - _theta2 / 120.0
    _theta2 = _theta * _theta
    return (np.sin(_theta) / _theta,
            (1.0 - np.cos(_theta)) / _theta2,
            (_theta - np.sin(_theta)) / (_theta2 * _theta))


def exp_rotation(_phi):
    """Rodrigues' formula, SO(3) exponential of a rotation vector"""
    _phi = np.asarray(_phi, dtype=float)
    _A, _B, _ = _rotation_coefficients(float(np.linalg.norm(_phi)))
    _K = skew(_phi)
    return np.eye(3) + _A * _K + _B * (_K @ _K)


def exp(xi):
    """
    The SE(3) exponential of a twist (rho, phi).

    :param xi: A 6-vector, translation part first
    :return: A PoseSE3
    """
    _xi = np.asarray(xi, dtype=float).reshape(6)
    if not np.all(np.isfinite(_xi)):
        raise ValueError("exp: Non-finite twist " + str(_xi))
    _rho, _phi = _xi[:3], _xi[3:]
    _A, _B, _C = _rotation_coefficients(float(np.linalg.norm(_phi)))
    _K = skew(_phi)
    _K2 = _K @ _K
    _R = np.eye(3) + _A * _K + _B * _K2
    _V = np.eye(3) + _B * _K + _C * _K2
    return PoseSE3(orthonormalized(_R), _V @ _rho, _check=False)


def log_rotation(_R):
    """
    The SO(3) logarithm as a rotation vector.

    :return: (phi, flagged), flagged is True within near_pi of a half turn
    """
    _R = np.asarray(_R, dtype=float)
    # sin(theta) * axis
    _w = 0.5 * np.array([_R[2, 1] - _R[1, 2], _R[0, 2] - _R[2, 0], _R[1, 0] - _R[0, 1]])
    _cos = np.clip(0.5 * (np.trace(_R) - 1.0), -1.0, 1.0)
    _sin = np.linalg.norm(_w)
    _theta = np.arctan2(_sin, _cos)

    if _theta < small_angle:
        # R = I + [phi]x + O(phi^2)
        return _w, False

    if np.pi - _theta < near_pi:
        # The antisymmetric part vanishes at pi, the axis is read from the symmetric part
        _S = (0.5 * (_R + _R.T) - _cos * np.eye(3)) / (1.0 - _cos)
        _i = int(np.argmax(np.diag(_S)))
        _axis = _S[:, _i] / np.sqrt(_S[_i, _i])
        if np.dot(_axis, _w) < 0:
            _axis = -_axis
        return _theta * _axis / np.linalg.norm(_axis), True

    return _theta * _w / _sin, False


def log(pose):
    """
    The SE(3) logarithm of a pose. Rotations within near_pi of a half turn emit a NearPiRotation warning,
    the returned twist then has an arbitrary axis sign.

    :param pose: A PoseSE3
    :return: A 6-vector (rho, phi)
    """
    _phi, _flagged = log_rotation(pose.R)
    if _flagged:
        warnings.warn(NearPiRotation("log: Rotation angle within " + str(near_pi) + " of pi, axis sign is arbitrary"),
                      stacklevel=2)
    _A, _B, _C = _rotation_coefficients(float(np.linalg.norm(_phi)))
    _K = skew(_phi)
    _V = np.eye(3) + _B * _K + _C * (_K @ _K)
    return np.concatenate([np.linalg.solve(_V, pose.t), _phi])


def apply_update(xi, pose):
    """The left-multiplicative update exp(xi) * pose"""
    return exp(xi).compose(pose)


def random_rotation(_rng, _max_angle=np.pi):
    """A rotation with a uniformly distributed axis and an angle uniform in [0, _max_angle)"""
    _axis = _rng.normal(size=3)
    _axis /= np.linalg.norm(_axis)
    return exp_rotation(_axis * _rng.uniform(0.0, _max_angle))
