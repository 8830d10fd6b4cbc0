"""
The reprojection module holds the stereo reprojection factor: the residual between the projection of a
landmark and its observed (uL, v, uR) pixels, and its analytic Jacobians with respect to a left-multiplied
pose twist and to the landmark position.

Created on Feb 3, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass

import numpy as np

from pavo.geometry.camera import NonPositiveDepth, GeometryError, project

__author__ = 'Nicklas Borjesson'


@dataclass(frozen=True)
class StereoObservation:
    """A landmark seen in a frame, pixels (uL, v, uR) and an inverse variance weight in 1/px^2"""
    frame_id: int
    landmark_id: int
    uL: float
    v: float
    uR: float
    weight: float = 1.0

    def __post_init__(self):
        if not self.uL > self.uR:
            raise GeometryError("StereoObservation: uL must exceed uR, got " + str(self))
        if not self.weight > 0:
            raise GeometryError("StereoObservation: weight must be positive, got " + str(self))

    @property
    def pixel(self):
        return np.array([self.uL, self.v, self.uR])


def _skew_many(_v):
    """N x 3 x 3 cross product matrices"""
    _result = np.zeros((len(_v), 3, 3))
    _result[:, 0, 1] = -_v[:, 2]
    _result[:, 0, 2] = _v[:, 1]
    _result[:, 1, 0] = _v[:, 2]
    _result[:, 1, 2] = -_v[:, 0]
    _result[:, 2, 0] = -_v[:, 1]
    _result[:, 2, 1] = _v[:, 0]
    return _result


def projection_jacobians(K, pc):
    """
    The Jacobians of the stereo projection at N camera frame points.

    :return: An N x 3 x 3 array, d(uL, v, uR) / d(X, Y, Z)
    """
    _X, _Y, _Z = pc[:, 0], pc[:, 1], pc[:, 2]
    _inv_z = 1.0 / _Z
    _inv_z2 = _inv_z * _inv_z
    _J = np.zeros((len(pc), 3, 3))
    _J[:, 0, 0] = K.fx * _inv_z
    _J[:, 0, 2] = -K.fx * _X * _inv_z2
    _J[:, 1, 1] = K.fy * _inv_z
    _J[:, 1, 2] = -K.fy * _Y * _inv_z2
    _J[:, 2, 0] = K.fx * _inv_z
    _J[:, 2, 2] = -K.fx * (_X - K.b) * _inv_z2
    return _J


def transform_many(R, t, points):
    """
    Maps N points into camera frames.

    :param R: A 3 x 3 rotation, or N x 3 x 3 with one rotation per point
    :param t: A 3-vector, or N x 3
    :param points: N x 3 world points
    :return: N x 3 camera frame points
    """
    if R.ndim == 2:
        return points @ R.T + t
    return np.einsum("nij,nj->ni", R, points) + t


def reprojection_residuals(K, R, t, points, pixels):
    """
    Vectorized reprojection residuals.

    :return: (residuals N x 3, camera frame points N x 3, valid mask), residuals of points at or behind
    the camera are set to zero and flagged invalid
    """
    _pc = transform_many(R, t, points)
    _valid = _pc[:, 2] > 0
    _z = np.where(_valid, _pc[:, 2], 1.0)
    _proj = np.stack([K.fx * _pc[:, 0] / _z + K.cx,
                      K.fy * _pc[:, 1] / _z + K.cy,
                      K.fx * (_pc[:, 0] - K.b) / _z + K.cx], axis=1)
    _residuals = np.where(_valid[:, None], _proj - pixels, 0.0)
    return _residuals, _pc, _valid


def reprojection_jacobians_many(K, R, pc):
    """
    Vectorized Jacobians of the reprojection residual.

    :param K: The Intrinsics
    :param R: The rotation (3 x 3 or N x 3 x 3) mapping the landmarks into the camera frames
    :param pc: N x 3 camera frame points, z > 0
    :return: (N x 3 x 6 with respect to the left-multiplied twist at zero, N x 3 x 3 with respect to the landmark)
    """
    _Jpi = projection_jacobians(K, pc)
    _J_pose = np.empty((len(pc), 3, 6))
    # d(exp(xi) pc) / d(rho, phi) = [I, -[pc]x]
    _J_pose[:, :, :3] = _Jpi
    _J_pose[:, :, 3:] = -_Jpi @ _skew_many(pc)
    _J_point = _Jpi @ R
    return _J_pose, _J_point


def reprojection_residual(K, pose, p, obs):
    """
    The reprojection residual pi(R p + t) - (uL, v, uR).

    :param K: The Intrinsics
    :param pose: The PoseSE3 of the observing frame
    :param p: The world landmark position
    :param obs: A StereoObservation or the (uL, v, uR) pixels
    :return: A 3-vector
    """
    _pixel = obs.pixel if isinstance(obs, StereoObservation) else np.asarray(obs, dtype=float)
    return project(K, pose.R @ np.asarray(p, dtype=float) + pose.t) - _pixel


def reprojection_jacobians(K, pose, p):
    """
    The analytic Jacobians of reprojection_residual.

    :return: (3 x 6 with respect to the twist xi of the update exp(xi) * pose at xi = 0, 3 x 3 with respect to p)
    """
    _pc = pose.R @ np.asarray(p, dtype=float) + pose.t
    if not _pc[2] > 0:
        raise NonPositiveDepth("reprojection_jacobians: Landmark is not in front of the camera")
    _J_pose, _J_point = reprojection_jacobians_many(K, pose.R, _pc[None, :])
    return _J_pose[0], _J_point[0]
