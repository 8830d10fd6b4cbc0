"""
The camera module holds the rectified stereo camera model: projection of camera frame points to
(uL, v, uR) measurements and triangulation back to points.

Created on Feb 2, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass

import numpy as np

from pavo.common.errors import PavoError
from pavo.common.logging import EC_INVALID

__author__ = 'Nicklas Borjesson'

#: Observations with a disparity at or below this (pixels) cannot be triangulated
default_min_disparity = 0.5


class GeometryError(PavoError, ValueError):
    """Base of the geometric errors"""
    category = EC_INVALID


class NonPositiveDepth(GeometryError):
    """A point that is projected is at or behind the camera"""
    pass


class DegenerateDisparity(GeometryError):
    """The disparity of an observation is too small to triangulate"""
    pass


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole intrinsics of a rectified stereo pair, pixels, and its baseline in meters"""
    fx: float
    fy: float
    cx: float
    cy: float
    b: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0 and self.b > 0):
            raise GeometryError("Intrinsics: fx, fy and b must be positive, got " + str(self))

    def as_tuple(self):
        return self.fx, self.fy, self.cx, self.cy, self.b


def project(K, pc):
    """
    Projects a camera frame point into the stereo pair.

    :param K: The Intrinsics
    :param pc: A 3-vector in the camera frame
    :return: The measurement (uL, v, uR) as a 3-vector
    """
    _X, _Y, _Z = np.asarray(pc, dtype=float)
    if not _Z > 0:
        raise NonPositiveDepth("project: Point " + str(list(pc)) + " is not in front of the camera")
    return np.array([K.fx * _X / _Z + K.cx,
                     K.fy * _Y / _Z + K.cy,
                     K.fx * (_X - K.b) / _Z + K.cx])


def project_many(K, pc):
    """
    Projects an N x 3 array of camera frame points, without depth checks.

    :return: An N x 3 array of (uL, v, uR)
    """
    _pc = np.asarray(pc, dtype=float)
    _X, _Y, _Z = _pc[:, 0], _pc[:, 1], _pc[:, 2]
    return np.stack([K.fx * _X / _Z + K.cx,
                     K.fy * _Y / _Z + K.cy,
                     K.fx * (_X - K.b) / _Z + K.cx], axis=1)


def triangulate(K, obs, _min_disparity=default_min_disparity):
    """
    Triangulates a stereo measurement into the camera frame.

    :param K: The Intrinsics
    :param obs: The measurement (uL, v, uR)
    :param _min_disparity: Disparities at or below this raise DegenerateDisparity
    :return: The camera frame point as a 3-vector
    """
    _uL, _v, _uR = np.asarray(obs, dtype=float)[:3]
    _d = _uL - _uR
    if not _d > _min_disparity:
        raise DegenerateDisparity("triangulate: Disparity " + str(_d) + " is not above " + str(_min_disparity))
    _Z = K.fx * K.b / _d
    return np.array([(_uL - K.cx) * _Z / K.fx, (_v - K.cy) * _Z / K.fy, _Z])
