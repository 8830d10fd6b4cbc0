"""
The mapping module holds keyframe insertion, local bundle adjustment with normal factors and the
chi-square outlier rejection.

Created on Feb 6, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass

import numpy as np

from pavo.common.logging import write_to_log, EC_MAPPING, SEV_DEBUG, SEV_INFO, SEV_ERROR
from pavo.estimator.config import InsufficientKeyframes
from pavo.estimator.map import Keyframe, Landmark
from pavo.estimator.solver import BundleProblem, levenberg_marquardt
from pavo.factors.reprojection import reprojection_residuals
from pavo.geometry.camera import triangulate
from pavo.geometry.lie import transform_point

__author__ = 'Nicklas Borjesson'


@dataclass
class BAReport:
    """What a local bundle adjustment did"""
    keyframe_id: int
    optimized_keyframes: int
    fixed_keyframes: int
    landmarks: int
    observations: int
    iterations: int
    initial_cost: float
    final_cost: float
    #: The final cost split into its reprojection and normal terms
    reprojection_cost: float
    normal_cost: float
    removed_observations: int
    global_normal_optimized: bool
    termination: str

    def __str__(self):
        return "BA at keyframe " + str(self.keyframe_id) + ": " + str(self.optimized_keyframes) + " optimized and " + \
               str(self.fixed_keyframes) + " fixed keyframes, " + str(self.landmarks) + " landmarks, " + \
               str(self.observations) + " observations, " + str(self.iterations) + " iterations, cost " + \
               str(self.initial_cost) + " -> " + str(self.final_cost) + " (reprojection " + \
               str(self.reprojection_cost) + ", normal " + str(self.normal_cost) + "), " + \
               str(self.removed_observations) + " observations rejected" + \
               (", n_w optimized" if self.global_normal_optimized else "")


def insert_keyframe(_map, _frame, _pose, _inliers, _K, _config):
    """
    Makes a keyframe of a tracked frame. Inlier observations of mapped landmarks are added, unmatched
    observations are triangulated into new landmarks. A landmark observed by fewer than two keyframes gets the
    observation even when tracking rejected it, a single stereo triangulation is too poor in depth to be
    trusted and the bundle adjustment needs a second view to repair it. The first keyframe with a measured
    normal seeds the global normal, and every insertion counts down the keyframes during which it is optimized.

    :param _map: The MapState
    :param _frame: The FrameObservations
    :param _pose: The tracked pose
    :param _inliers: Per observation row, True for tracking inliers
    :param _K: The Intrinsics
    :param _config: A SolverConfig
    :return: The new Keyframe
    """
    _weight = _config.observation_weight
    _world_from_camera = _pose.inverse()
    with _map.lock:
        # The first keyframe defines the world frame and fixes the gauge
        _keyframe = Keyframe(_frame.frame_id, _pose, _frame.timestamp, _frame.normal, _fixed=not _map.keyframes)
        _map.add_keyframe(_keyframe)
        _new_landmarks = 0
        _attached = 0
        for _row, (_curr_id, _curr_pixel) in enumerate(zip(_frame.landmark_ids.tolist(), _frame.pixels)):
            if (_keyframe.id, _curr_id) in _map.observations:
                continue
            if _curr_id in _map.landmarks:
                if not _inliers[_row]:
                    if len(_map.landmarks[_curr_id].observers) >= 2:
                        continue
                    _attached += 1
            elif _curr_pixel[0] - _curr_pixel[2] > _config.min_disparity:
                _position = transform_point(_world_from_camera, triangulate(_K, _curr_pixel, _config.min_disparity))
                _map.add_landmark(Landmark(_curr_id, _position, _created_at=len(_map.keyframes)))
                _new_landmarks += 1
            else:
                continue
            _map.add_observation(_map.make_observation(_keyframe.id, _curr_id, _curr_pixel, _weight))
        _keyframe.reference_count = len(_keyframe.observations) - _attached

        if _map.global_normal is None and _keyframe.normal is not None:
            # n_w = R_k^T n_k
            _map.global_normal = _pose.R.T @ _keyframe.normal
            write_to_log("insert_keyframe: Global normal initialized to " + str(_map.global_normal.tolist()),
                         _category=EC_MAPPING, _severity=SEV_INFO, _frame_id=_keyframe.id)
        if _map.normal_init_remaining > 0:
            _map.normal_init_remaining -= 1
            if _map.normal_init_remaining == 0:
                write_to_log("insert_keyframe: Global normal is fixed from now on",
                             _category=EC_MAPPING, _severity=SEV_INFO, _frame_id=_keyframe.id)

    write_to_log("insert_keyframe: Keyframe " + str(_keyframe.id) + " with " + str(_keyframe.reference_count) +
                 " observations, " + str(_new_landmarks) + " new landmarks, " + str(_attached) +
                 " rejected observations of young landmarks kept",
                 _category=EC_MAPPING, _severity=SEV_DEBUG, _frame_id=_keyframe.id)
    return _keyframe


def local_scope(_map, _kf_id, _config):
    """
    The keyframes and landmarks of the local bundle adjustment around _kf_id.

    The local window is the keyframe and its most covisible neighbours, local_window keyframes at most.
    Keyframes of the window are optimized unless flagged fixed, every other keyframe observing a landmark of
    the window is included with its pose fixed.

    :return: (optimized keyframe ids, fixed keyframe ids, landmark ids), all sorted
    """
    _window = [_kf_id] + _map.covisible(_kf_id, _config.covisibility_min_shared)[:_config.local_window - 1]
    _landmark_ids = sorted(set().union(*[_map.keyframes[_curr].observations for _curr in _window]))
    _involved = set(_window).union(*[_map.landmarks[_curr].observers for _curr in _landmark_ids])
    _optimized = sorted([_curr for _curr in _window if not _map.keyframes[_curr].fixed])
    _fixed = sorted(_involved.difference(_optimized))
    return _optimized, _fixed, _landmark_ids


def _build_problem(_map, _K, _config, _optimized, _fixed, _landmark_ids):
    _index = dict((_curr_id, _curr) for _curr, _curr_id in enumerate(_landmark_ids))
    _keys = [(_curr_kf, _curr_lm) for _curr_lm in _landmark_ids
             for _curr_kf in sorted(_map.landmarks[_curr_lm].observers)]
    _pixels, _weights = _map.observation_arrays(_keys)
    _keyframe_ids = list(_optimized) + list(_fixed)
    _normals = dict((_curr, (_map.keyframes[_curr].normal, _map.keyframes[_curr].basis))
                    for _curr in _keyframe_ids if _map.keyframes[_curr].normal is not None)
    return BundleProblem(_K, _config.loss, _keyframe_ids, _optimized,
                         dict((_curr, _map.keyframes[_curr].pose) for _curr in _keyframe_ids),
                         np.array([_map.landmarks[_curr].position for _curr in _landmark_ids]).reshape(-1, 3),
                         [_curr[0] for _curr in _keys], [_index[_curr[1]] for _curr in _keys],
                         _pixels, _weights, _normals=_normals, _global_normal=_map.global_normal,
                         _optimize_global_normal=_map.normal_init_remaining > 0), len(_keys)


def _write_back(_map, _problem, _landmark_ids):
    for _curr_id in _problem.optimized_ids:
        _map.keyframes[_curr_id].pose = _problem.state.poses[_curr_id]
    for _curr, _curr_id in enumerate(_landmark_ids):
        _map.landmarks[_curr_id].position = np.array(_problem.state.points[_curr])
    if _problem.optimize_global_normal:
        _map.global_normal = np.array(_problem.state.global_normal)


def local_bundle_adjustment(_map, _kf_id, _K, _config):
    """
    Jointly optimizes the poses of the local window, the landmarks they observe and, while the countdown of
    the map has not run out, the global normal.

    The solve is split in two: after half of max_iterations outliers are rejected by the chi-square test
    and the remaining iterations run on the cleaned observations.

    :param _map: The MapState
    :param _kf_id: The current keyframe
    :param _K: The Intrinsics
    :param _config: A SolverConfig
    :return: A BAReport
    """
    with _map.lock:
        if len(_map.keyframes) < 2:
            raise InsufficientKeyframes(write_to_log("local_bundle_adjustment: At least two keyframes are needed, "
                                                     "the map has " + str(len(_map.keyframes)),
                                                     _category=EC_MAPPING, _severity=SEV_ERROR, _frame_id=_kf_id))
        _optimized, _fixed, _landmark_ids = local_scope(_map, _kf_id, _config)
        _optimize_global_normal = _map.normal_init_remaining > 0

        _problem, _observation_count = _build_problem(_map, _K, _config, _optimized, _fixed, _landmark_ids)
        _first = levenberg_marquardt(_problem, _config, _max_iterations=max(1, _config.max_iterations // 2))
        _write_back(_map, _problem, _landmark_ids)
        _iterations, _final, _termination = _first.iterations, _first, _first.termination

        _removed = reject_outliers(_map, _K, _config, _landmark_ids=_landmark_ids)
        _remaining = _config.max_iterations - _first.iterations
        if _remaining > 0 and (_removed > 0 or _first.termination == "max_iterations"):
            _landmark_ids = [_curr for _curr in _landmark_ids if _curr in _map.landmarks]
            _problem, _ = _build_problem(_map, _K, _config, _optimized, _fixed, _landmark_ids)
            _final = levenberg_marquardt(_problem, _config, _max_iterations=_remaining, _damping=_first.damping)
            _write_back(_map, _problem, _landmark_ids)
            _iterations += _final.iterations
            _termination = _final.termination

        _reprojection_cost, _normal_cost = _problem.cost_terms()

    _report = BAReport(keyframe_id=_kf_id, optimized_keyframes=len(_optimized), fixed_keyframes=len(_fixed),
                       landmarks=len(_landmark_ids), observations=_observation_count, iterations=_iterations,
                       initial_cost=_first.initial_cost, final_cost=_final.final_cost,
                       reprojection_cost=_reprojection_cost, normal_cost=_normal_cost, removed_observations=_removed,
                       global_normal_optimized=_optimize_global_normal, termination=_termination)
    write_to_log(str(_report), _category=EC_MAPPING, _severity=SEV_DEBUG, _frame_id=_kf_id)
    return _report


def reject_outliers(_map, _K, _config, _landmark_ids=None):
    """
    Removes every observation whose whitened squared residual norm exceeds chi2_threshold, or whose landmark
    is not in front of the camera. Landmarks left without observations are deleted.

    :param _landmark_ids: Only the observations of these landmarks are tested, all if None
    :return: The number of removed observations
    """
    with _map.lock:
        if _landmark_ids is None:
            _keys = sorted(_map.observations)
        else:
            _keys = [(_curr_kf, _curr_lm) for _curr_lm in _landmark_ids if _curr_lm in _map.landmarks
                     for _curr_kf in sorted(_map.landmarks[_curr_lm].observers)]
        if not _keys:
            return 0
        _pixels, _weights = _map.observation_arrays(_keys)
        _R = np.array([_map.keyframes[_curr[0]].pose.R for _curr in _keys])
        _t = np.array([_map.keyframes[_curr[0]].pose.t for _curr in _keys])
        _points = np.array([_map.landmarks[_curr[1]].position for _curr in _keys])
        _res, _, _valid = reprojection_residuals(_K, _R, _t, _points, _pixels)
        _chi2 = np.sum(_res * _res, axis=1) * _weights
        _rejected = np.nonzero(~_valid | (_chi2 > _config.chi2_threshold))[0]
        _deleted = 0
        for _curr in _rejected.tolist():
            if _map.remove_observation(*_keys[_curr]):
                _deleted += 1

    if len(_rejected):
        write_to_log("reject_outliers: Removed " + str(len(_rejected)) + " of " + str(len(_keys)) +
                     " observations, " + str(_deleted) + " landmarks deleted", _category=EC_MAPPING,
                     _severity=SEV_DEBUG)
    return len(_rejected)


def cull_landmarks(_map, _config):
    """
    Deletes the landmarks that are still observed by a single keyframe landmark_cull_keyframes keyframes after
    they were triangulated. They never got a second view to fix their depth and only mislead tracking.

    :return: The number of deleted landmarks
    """
    with _map.lock:
        _keyframe_count = len(_map.keyframes)
        _stale = [_curr for _curr in _map.landmarks.values()
                  if len(_curr.observers) <= 1 and
                  _keyframe_count - _curr.created_at >= _config.landmark_cull_keyframes]
        for _curr_landmark in _stale:
            for _curr_kf in sorted(_curr_landmark.observers):
                _map.remove_observation(_curr_kf, _curr_landmark.id)

    if _stale:
        write_to_log("cull_landmarks: Deleted " + str(len(_stale)) + " landmarks with a single observation, " +
                     str(len(_map.landmarks)) + " left", _category=EC_MAPPING, _severity=SEV_DEBUG)
    return len(_stale)
