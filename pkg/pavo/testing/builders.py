"""
Builders for the behave features: small simulated scenes, maps built at the ground truth and random
geometric configurations.

Created on Feb 17, 2016

@author: Nicklas Boerjesson
"""
import numpy as np

from pavo.estimator.config import SolverConfig
from pavo.estimator.map import MapState, Keyframe, Landmark
from pavo.estimator.mapping import insert_keyframe
from pavo.evaluation.metrics import align, ate
from pavo.evaluation.trajectory import Trajectory
from pavo.geometry.camera import Intrinsics, project_many
from pavo.geometry.lie import PoseSE3, exp, log_rotation, random_rotation, transform_point
from pavo.simulator.config import SceneConfig

__author__ = 'Nicklas Borjesson'

#: The intrinsics of the worked examples, K = (400, 400, 320, 240, 0.05)
example_intrinsics = Intrinsics(fx=400.0, fy=400.0, cx=320.0, cy=240.0, b=0.05)


def small_scene(**kwargs):
    """
    A short noiseless straight flight over an exactly planar field, 21 frames 0.2 m apart.
    Keyword arguments replace settings.
    """
    return SceneConfig(landmark_count=1500, extent_x=12.0, extent_y=8.0, roughness=0.0, noise_px=0.0,
                       outlier_rate=0.0, trajectory_shape="straight", trajectory_length=4.0, speed=2.0,
                       frame_rate=10.0, attitude_wobble=0.01, normal_noise_deg=0.0, seed=7).with_changes(**kwargs)


#: The run configuration of small_scene, with the relative distance error over 5 frames and a single seed
small_run_config_text = """
landmark_count = 1500
extent_x = 12.0
extent_y = 8.0
roughness = 0.0
noise_px = 0.0
outlier_rate = 0.0
trajectory_shape = straight
trajectory_length = 4.0
frame_rate = 10.0
normal_noise_deg = 0.0
seed = 7
rde_delta = 5
experiment_seeds = 1
"""


def random_twist(_rng, _max_angle=3.0, _max_translation=1.0):
    """A twist with a rotation angle below _max_angle and translation components within _max_translation"""
    _axis = _rng.normal(size=3)
    _axis /= np.linalg.norm(_axis)
    return np.concatenate([_rng.uniform(-_max_translation, _max_translation, 3),
                           _axis * _rng.uniform(0.0, _max_angle)])


def random_pose(_rng, _max_angle=np.pi, _max_translation=1.0):
    return PoseSE3(random_rotation(_rng, _max_angle), _rng.uniform(-_max_translation, _max_translation, 3))


def perturbation(_rng, _norm):
    """A random twist of the given norm"""
    _xi = _rng.normal(size=6)
    return _xi / np.linalg.norm(_xi) * _norm


def planar_landmarks(_rng, _pose, _count=200, _depth=5.0, _roughness=0.01):
    """
    Landmarks spread over the field of view of the example camera at _pose, near a plane at _depth.

    :return: (world positions N x 3, (uL, v, uR) pixels N x 3)
    """
    _camera = np.stack([_rng.uniform(-3.0, 3.0, _count), _rng.uniform(-2.0, 2.0, _count),
                        _depth + _rng.normal(0.0, 1.0, _count) * _roughness], axis=1)
    return transform_point(_pose.inverse(), _camera), project_many(example_intrinsics, _camera)


def map_at_ground_truth(_sequence, _keyframe_indices, _config=None):
    """
    A map whose keyframes are the given frames of a SimulatedSequence at their ground truth poses.
    Every observation with a usable disparity is added, landmarks are triangulated from the first observing
    keyframe.
    """
    _config = _config or SolverConfig()
    _map = MapState(_config.normal_init_window)
    for _curr in _keyframe_indices:
        _frame = _sequence.frames[_curr]
        insert_keyframe(_map, _frame, _sequence.poses[_curr], _frame.disparities > _config.min_disparity,
                        _sequence.intrinsics, _config)
    return _map


def move_landmarks_to_ground_truth(_map, _sequence):
    """Landmark ids index the landmarks of the sequence"""
    for _curr in _map.landmarks.values():
        _curr.position = np.array(_sequence.landmarks[_curr.id])


def single_observation_map(_position, _pixel, _weight=1.0):
    """One keyframe at the identity observing one landmark"""
    _map = MapState()
    _map.add_keyframe(Keyframe(0, PoseSE3.identity(), _fixed=True))
    _map.add_landmark(Landmark(0, _position))
    _map.add_observation(MapState.make_observation(0, 0, _pixel, _weight))
    return _map


def trajectory_ate_rmse(_records, _sequence):
    """The ATE RMSE of the PoseRecords of a run against the ground truth of its sequence, 3D aligned"""
    _estimate = Trajectory.from_world_to_camera([_curr.timestamp for _curr in _records],
                                                [_curr.pose for _curr in _records])
    _ground_truth = Trajectory.from_world_to_camera(_sequence.timestamps[:len(_records)],
                                                    _sequence.poses[:len(_records)])
    return ate(_estimate, _ground_truth, align(_estimate, _ground_truth)).rmse


def pose_difference(_a, _b):
    """(rotation angle in radians, translation distance) between two poses"""
    _phi, _ = log_rotation(_a.R @ _b.R.T)
    return float(np.linalg.norm(_phi)), float(np.linalg.norm(_a.t - _b.t))


def rotation_about(_axis, _angle):
    """A pure rotation pose, _axis is "x", "y" or "z"""
    _phi = np.zeros(3)
    _phi["xyz".index(_axis)] = _angle
    return exp(np.concatenate([np.zeros(3), _phi]))
