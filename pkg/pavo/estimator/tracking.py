"""
The tracking module estimates the pose of every incoming frame against the landmarks of the map and
decides whether the frame becomes a keyframe.

Created on Feb 5, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass

import numpy as np

from pavo.common.internal import timed
from pavo.common.logging import write_to_log, EC_TRACKING, SEV_ERROR, SEV_DEBUG
from pavo.estimator.config import TrackingLost, SolverDiverged
from pavo.estimator.solver import PoseProblem, levenberg_marquardt
from pavo.factors.normal import make_tangent_basis
from pavo.factors.reprojection import reprojection_residuals
from pavo.geometry.lie import PoseSE3

__author__ = 'Nicklas Borjesson'


@dataclass
class TrackingResult:
    frame_id: int
    pose: PoseSE3
    #: Per row of the frame observations, True for inliers of mapped landmarks
    inliers: np.ndarray
    #: Per row, True where the landmark was in the map
    matched: np.ndarray
    iterations: int
    cost: float

    @property
    def inlier_count(self):
        return int(np.count_nonzero(self.inliers))

    @property
    def matched_count(self):
        return int(np.count_nonzero(self.matched))


def predict_pose(_previous):
    """
    The constant velocity motion model, T_init = (T_k-1 T_k-2^-1) T_k-1.

    :param _previous: The poses of the previous frames, oldest first
    :return: The prediction, identity without history and T_k-1 with a single previous pose
    """
    if not _previous:
        return PoseSE3.identity()
    if len(_previous) == 1:
        return _previous[-1]
    _last, _before = _previous[-1], _previous[-2]
    return _last.compose(_before.inverse()).compose(_last)


def _classify(_K, _pose, _points, _pixels, _weights, _threshold):
    """Inliers have a whitened squared residual norm within the chi-square threshold"""
    _res, _, _valid = reprojection_residuals(_K, _pose.R, _pose.t, _points, _pixels)
    _chi2 = np.sum(_res * _res, axis=1) * _weights
    return _valid & (_chi2 <= _threshold)


@timed("tracking")
def track_frame(_map, _frame, _previous, _K, _config):
    """
    Estimates the pose of a frame with the landmarks held fixed. The pose is optimized on every matched
    observation, outliers are rejected by the chi-square test and the pose is optimized again on the inliers.

    :param _map: The MapState
    :param _frame: The FrameObservations
    :param _previous: The poses of the previous frames, oldest first
    :param _K: The Intrinsics
    :param _config: A SolverConfig
    :return: A TrackingResult
    """
    with _map.lock:
        _matched = np.array([_curr in _map.landmarks for _curr in _frame.landmark_ids.tolist()], dtype=bool)
        _matched &= _frame.disparities > _config.min_disparity
        _rows = np.nonzero(_matched)[0]
        _points = np.array([_map.landmarks[_curr].position for _curr in _frame.landmark_ids[_rows].tolist()],
                           dtype=float).reshape(-1, 3)
        _global_normal = None if _map.global_normal is None else np.array(_map.global_normal)

    if len(_rows) < _config.min_tracking_observations:
        raise TrackingLost(write_to_log("track_frame: Frame " + str(_frame.frame_id) + " has " + str(len(_rows)) +
                                        " observations of mapped landmarks, at least " +
                                        str(_config.min_tracking_observations) + " are needed",
                                        _category=EC_TRACKING, _severity=SEV_ERROR, _frame_id=_frame.frame_id),
                           _frame_id=_frame.frame_id)

    _pixels = _frame.pixels[_rows]
    _weights = np.full(len(_rows), _config.observation_weight)
    _normal, _basis = None, None
    if _config.track_with_normal and _frame.normal is not None and _global_normal is not None:
        _normal = _frame.normal
        _basis = make_tangent_basis(_normal)

    def _optimize(_pose, _mask):
        _problem = PoseProblem(_K, _pose, _points[_mask], _pixels[_mask], _weights[_mask], _config.loss,
                               _normal=_normal, _basis=_basis, _global_normal=_global_normal)
        try:
            _summary = levenberg_marquardt(_problem, _config)
        except SolverDiverged as e:
            raise TrackingLost(write_to_log("track_frame: Pose optimization of frame " + str(_frame.frame_id) +
                                            " diverged: " + str(e), _category=EC_TRACKING, _severity=SEV_ERROR,
                                            _frame_id=_frame.frame_id), _frame_id=_frame.frame_id)
        return _problem.state, _summary

    _pose, _summary = _optimize(predict_pose(_previous), np.ones(len(_rows), dtype=bool))
    _iterations = _summary.iterations
    _inliers = _classify(_K, _pose, _points, _pixels, _weights, _config.chi2_threshold)
    if not np.all(_inliers) and np.count_nonzero(_inliers) >= _config.min_tracking_observations:
        _pose, _summary = _optimize(_pose, _inliers)
        _iterations += _summary.iterations
        _inliers = _classify(_K, _pose, _points, _pixels, _weights, _config.chi2_threshold)

    _inlier_count = int(np.count_nonzero(_inliers))
    if _inlier_count < _config.min_inlier_ratio * len(_rows) or _inlier_count < _config.min_tracking_observations:
        raise TrackingLost(write_to_log("track_frame: Frame " + str(_frame.frame_id) + " has " + str(_inlier_count) +
                                        " inliers of " + str(len(_rows)) + " matched observations",
                                        _category=EC_TRACKING, _severity=SEV_ERROR, _frame_id=_frame.frame_id),
                           _frame_id=_frame.frame_id)

    _all_inliers = np.zeros(len(_frame), dtype=bool)
    _all_inliers[_rows] = _inliers
    write_to_log("track_frame: " + str(_inlier_count) + "/" + str(len(_rows)) + " inliers, " + str(_iterations) +
                 " iterations", _category=EC_TRACKING, _severity=SEV_DEBUG, _frame_id=_frame.frame_id)
    return TrackingResult(frame_id=_frame.frame_id, pose=_pose, inliers=_all_inliers, matched=_matched,
                          iterations=_iterations, cost=_summary.final_cost)


def select_keyframe(_map, _frame_id, _inlier_count, _config):
    """
    A frame becomes a keyframe when its inliers drop below keyframe_inlier_ratio of the observations of the
    last keyframe, or when keyframe_max_gap frames have passed since it.
    """
    _last = _map.last_keyframe()
    if _last is None:
        return True
    if _frame_id - _last.id >= _config.keyframe_max_gap:
        return True
    return _inlier_count < _config.keyframe_inlier_ratio * _last.reference_count
