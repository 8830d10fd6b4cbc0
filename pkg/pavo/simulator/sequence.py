"""
The sequence module puts a simulated dataset together: scene, ground truth trajectory, and per frame the
labeled observations and the measured surface normal.

Created on Feb 10, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from pavo.common.logging import write_to_log, EC_NOTIFICATION, SEV_INFO, SEV_WARNING
from pavo.estimator.frame import FrameObservations
from pavo.geometry.camera import Intrinsics
from pavo.geometry.lie import PoseSE3, transform_point
from pavo.simulator.scene import generate_scene, generate_trajectory, world_from_ground, render_observations, \
    estimate_frame_normal, perturb_normal, DegenerateCloud

__author__ = 'Nicklas Borjesson'


@dataclass
class SimulatedSequence:
    """A simulated dataset, everything in the world frame (the first camera frame)"""
    intrinsics: Intrinsics
    timestamps: np.ndarray
    #: The ground truth T_k of every frame
    poses: List[PoseSE3]
    landmark_ids: np.ndarray
    landmarks: np.ndarray
    #: The normal of the pavement in the world frame
    plane_normal: np.ndarray
    frames: List[FrameObservations] = field(default_factory=list)
    #: The planarity score of each frame normal fit, nan where no normal was measured
    planarity: np.ndarray = None

    @property
    def outlier_count(self):
        return int(sum([np.count_nonzero(_curr.is_outlier) for _curr in self.frames]))

    @property
    def observation_count(self):
        return int(sum([len(_curr) for _curr in self.frames]))


def frame_rng(_seed, _frame_index):
    """The random generator of a frame, independent of every other frame"""
    return np.random.default_rng([_seed, 1, _frame_index])


def simulate_sequence(_config):
    """
    Simulates a dataset. All randomness is derived from the seed of the config, equal configs give
    bit-identical sequences.

    :param _config: A SceneConfig
    :return: A SimulatedSequence
    """
    _scene = generate_scene(_config)
    _to_world = world_from_ground(_config)
    _landmarks = transform_point(_to_world, _scene.positions)
    _plane_normal = _to_world.R @ _scene.plane_normal
    _timestamps, _poses = generate_trajectory(_config)
    _K = _config.intrinsics()

    _frames = []
    _planarity = np.full(len(_poses), np.nan)
    for _curr, (_curr_time, _curr_pose) in enumerate(zip(_timestamps, _poses)):
        _rng = frame_rng(_config.seed, _curr)
        _rendered = render_observations(_scene.landmark_ids, _landmarks, _curr_pose, _config, _rng)
        _normal = None
        try:
            _fitted, _planarity[_curr] = estimate_frame_normal(_rendered.camera_points)
            _normal = perturb_normal(_fitted, _config.normal_noise_deg, _rng)
        except DegenerateCloud as e:
            write_to_log("simulate_sequence: No normal for frame " + str(_curr) + ": " + str(e),
                         _category=EC_NOTIFICATION, _severity=SEV_WARNING, _frame_id=_curr)
        _frames.append(FrameObservations(frame_id=_curr, timestamp=float(_curr_time),
                                         landmark_ids=_rendered.landmark_ids, pixels=_rendered.pixels,
                                         normal=_normal, is_outlier=_rendered.is_outlier))

    _sequence = SimulatedSequence(intrinsics=_K, timestamps=_timestamps, poses=_poses,
                                  landmark_ids=_scene.landmark_ids, landmarks=_landmarks,
                                  plane_normal=_plane_normal, frames=_frames, planarity=_planarity)
    write_to_log("simulate_sequence: " + str(len(_frames)) + " frames, " + str(len(_landmarks)) + " landmarks, " +
                 str(_sequence.observation_count) + " observations of which " + str(_sequence.outlier_count) +
                 " outliers", _category=EC_NOTIFICATION, _severity=SEV_INFO)
    return _sequence
