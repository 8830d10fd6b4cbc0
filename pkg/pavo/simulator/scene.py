"""
The scene module generates the pavement: a near-planar landmark field, the flight of a downward-looking
stereo camera over it, the stereo observations of every frame and the surface normals measured in them.

Ground frame: z up, the field is centered on the origin. The world frame of the estimator is the first
camera frame.

Created on Feb 9, 2016

@author: Nicklas Boerjesson
"""
import math
from dataclasses import dataclass

import numpy as np

from pavo.common.errors import PavoError
from pavo.common.logging import EC_INVALID
from pavo.geometry.camera import project_many, default_min_disparity
from pavo.geometry.lie import PoseSE3, exp_rotation, transform_point

__author__ = 'Nicklas Borjesson'

#: Frequencies (Hz) of the roll and pitch oscillation
wobble_frequencies = (0.5, 0.3)
#: Clouds whose middle eigenvalue is below this share of the largest are collinear
collinear_ratio = 1e-12


class DegenerateCloud(PavoError, ValueError):
    """Too few points, or collinear points, to fit a plane to"""
    category = EC_INVALID


@dataclass
class Scene:
    """The landmarks in the ground frame and the normal of the pavement plane"""
    landmark_ids: np.ndarray
    positions: np.ndarray
    plane_normal: np.ndarray


def generate_scene(_config, _rng=None):
    """
    Landmarks uniformly distributed over the extent, at plane_height plus Gaussian scatter of roughness.

    :param _config: A SceneConfig
    :param _rng: A numpy Generator, seeded from the config if None
    :return: A Scene, the plane normal is the ground frame z axis
    """
    _rng = np.random.default_rng([_config.seed, 0]) if _rng is None else _rng
    _n = _config.landmark_count
    _x = _rng.uniform(-0.5 * _config.extent_x, 0.5 * _config.extent_x, _n)
    _y = _rng.uniform(-0.5 * _config.extent_y, 0.5 * _config.extent_y, _n)
    _z = _config.plane_height + _rng.normal(0.0, 1.0, _n) * _config.roughness
    return Scene(landmark_ids=np.arange(_n, dtype=np.int64), positions=np.stack([_x, _y, _z], axis=1),
                 plane_normal=np.array([0.0, 0.0, 1.0]))


def path_point(_config, _s):
    """
    The position (x, y) and heading at arc length _s along the flight path.

    The straight path runs along x, centered on the origin. The lawn-mower sweep flies rows along x, alternating
    direction, joined by half circle turns of radius row_spacing / 2, the rows centered on the origin.
    """
    _s = min(max(_s, 0.0), _config.trajectory_length)
    if _config.trajectory_shape == "straight":
        return -0.5 * _config.trajectory_length + _s, 0.0, 0.0

    _length = _config.row_length
    _radius = _config.turn_radius
    _turn = math.pi * _radius
    _row = min(int(_s // (_length + _turn)), _config.rows - 1)
    _u = _s - _row * (_length + _turn)
    _y = (_row - 0.5 * (_config.rows - 1)) * _config.row_spacing
    _direction = 1.0 if _row % 2 == 0 else -1.0
    if _u <= _length or _row == _config.rows - 1:
        _u = min(_u, _length)
        return _direction * (-0.5 * _length + _u), _y, 0.0 if _direction > 0 else math.pi
    _alpha = (_u - _length) / _radius
    _x = _direction * (0.5 * _length + _radius * math.sin(_alpha))
    _y = _y + _radius - _radius * math.cos(_alpha)
    return _x, _y, _alpha if _direction > 0 else math.pi - _alpha


def camera_at(_config, _time):
    """
    The camera at a time in the ground frame.

    The camera looks down, its x axis along the heading. A roll and pitch oscillation of attitude_wobble radians,
    zero at time 0, is applied in the camera frame.

    :return: (camera to ground rotation, camera center)
    """
    _x, _y, _heading = path_point(_config, _time * _config.speed)
    _c, _s = math.cos(_heading), math.sin(_heading)
    _R = np.array([[_c, _s, 0.0],
                   [_s, -_c, 0.0],
                   [0.0, 0.0, -1.0]])
    if _config.attitude_wobble > 0:
        _R = _R @ exp_rotation([_config.attitude_wobble * math.sin(2 * math.pi * wobble_frequencies[0] * _time),
                                _config.attitude_wobble * math.sin(2 * math.pi * wobble_frequencies[1] * _time),
                                0.0])
    return _R, np.array([_x, _y, _config.plane_height + _config.altitude])


def ground_rig(_config):
    """
    The camera of every frame in the ground frame.

    :return: (timestamps, camera to ground rotations N x 3 x 3, camera centers N x 3)
    """
    _timestamps = np.arange(_config.frame_count) / _config.frame_rate
    _cameras = [camera_at(_config, _curr_time) for _curr_time in _timestamps]
    return _timestamps, np.array([_curr[0] for _curr in _cameras]), np.array([_curr[1] for _curr in _cameras])


def world_from_ground(_config):
    """The transform of ground frame points into the world frame, the first camera frame"""
    _R0, _c0 = camera_at(_config, 0.0)
    return PoseSE3(_R0.T, -_R0.T @ _c0)


def generate_trajectory(_config):
    """
    The ground truth poses of the flight, T_k mapping world points into camera k.
    The first pose is the identity.

    :return: (timestamps, list of PoseSE3)
    """
    _timestamps, _rotations, _centers = ground_rig(_config)
    _R0, _c0 = _rotations[0], _centers[0]
    _poses = [PoseSE3.identity()]
    for _curr in range(1, len(_timestamps)):
        _poses.append(PoseSE3(_rotations[_curr].T @ _R0, _rotations[_curr].T @ (_c0 - _centers[_curr])))
    return _timestamps, _poses


def estimate_frame_normal(_points):
    """
    Least-squares plane fit. The normal is the eigenvector of the smallest eigenvalue of the centered scatter
    matrix, signed to point back toward a downward-looking camera (negative z).

    :param _points: N x 3 camera frame points
    :return: (unit normal, planarity score = smallest / middle eigenvalue, 0 for an exact plane)
    """
    _points = np.asarray(_points, dtype=float).reshape(-1, 3)
    if len(_points) < 3:
        raise DegenerateCloud("estimate_frame_normal: A plane needs at least 3 points, got " + str(len(_points)))
    _centered = _points - np.mean(_points, axis=0)
    _values, _vectors = np.linalg.eigh(_centered.T @ _centered)
    if not _values[1] > collinear_ratio * _values[2]:
        raise DegenerateCloud("estimate_frame_normal: The points are collinear")
    _normal = _vectors[:, 0]
    if _normal[2] > 0:
        _normal = -_normal
    return _normal / np.linalg.norm(_normal), float(max(_values[0], 0.0) / _values[1])


def perturb_normal(_normal, _sigma_deg, _rng):
    """Rotates a normal about a random axis by a Gaussian angle of _sigma_deg degrees"""
    _axis = _rng.normal(size=3)
    _angle = _rng.normal(0.0, 1.0) * math.radians(_sigma_deg)
    if _sigma_deg <= 0:
        return _normal
    _result = exp_rotation(_axis / np.linalg.norm(_axis) * _angle) @ _normal
    return _result / np.linalg.norm(_result)


@dataclass
class RenderedFrame:
    """The observations of one frame, rows correspond"""
    landmark_ids: np.ndarray
    pixels: np.ndarray
    is_outlier: np.ndarray
    #: The noiseless camera frame positions of the observed landmarks
    camera_points: np.ndarray


def render_observations(_landmark_ids, _positions, _pose, _config, _rng):
    """
    Observes the landmarks from a pose. Visible landmarks are in front of the camera, inside both images
    and have a disparity above default_min_disparity. Pixels get Gaussian noise of noise_px and an outlier_rate
    share of them is displaced by outlier_px in a random direction, the same in both images.

    :param _landmark_ids: N landmark ids
    :param _positions: N x 3 world positions
    :param _pose: The PoseSE3 of the frame
    :param _config: A SceneConfig
    :param _rng: The numpy Generator of the frame
    :return: A RenderedFrame
    """
    _pc = transform_point(_pose, _positions)
    _front = _pc[:, 2] > 0
    _pixels = np.zeros((len(_pc), 3))
    _pixels[_front] = project_many(_config.intrinsics(), _pc[_front])
    _visible = _front & (_pixels[:, 0] >= 0) & (_pixels[:, 0] < _config.image_width) & \
        (_pixels[:, 2] >= 0) & (_pixels[:, 1] >= 0) & (_pixels[:, 1] < _config.image_height) & \
        (_pixels[:, 0] - _pixels[:, 2] > default_min_disparity)
    _rows = np.nonzero(_visible)[0]
    _pixels = _pixels[_rows] + _rng.normal(0.0, 1.0, (len(_rows), 3)) * _config.noise_px

    _is_outlier = _rng.random(len(_rows)) < _config.outlier_rate
    _angles = _rng.uniform(0.0, 2 * math.pi, len(_rows))
    _du = np.where(_is_outlier, _config.outlier_px * np.cos(_angles), 0.0)
    _dv = np.where(_is_outlier, _config.outlier_px * np.sin(_angles), 0.0)
    _pixels += np.stack([_du, _dv, _du], axis=1)
    return RenderedFrame(landmark_ids=np.asarray(_landmark_ids)[_rows], pixels=_pixels, is_outlier=_is_outlier,
                         camera_points=_pc[_rows])
