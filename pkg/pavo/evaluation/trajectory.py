"""
The trajectory module holds timestamped trajectories and the association of an estimate with its ground truth.

Created on Feb 11, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass

import numpy as np

from pavo.common.errors import PavoError, EXIT_DATA
from pavo.common.logging import write_to_log, EC_INVALID, SEV_WARNING

__author__ = 'Nicklas Borjesson'


class EvaluationError(PavoError):
    """Base of the evaluation errors"""
    category = EC_INVALID
    exit_code = EXIT_DATA


class TooFewPoses(EvaluationError):
    """Alignment needs at least three poses"""
    pass


class TimestampMismatch(EvaluationError):
    """The timestamps of two trajectories do not correspond"""
    pass


class SequenceTooShort(EvaluationError):
    """The trajectory is not longer than the frame step of the relative distance error"""
    pass


class Trajectory(object):
    """
    Timestamped camera poses. Each pose maps camera points into the world, its translation is the
    camera position. Timestamps are strictly increasing.
    """

    def __init__(self, _timestamps, _poses):
        self.timestamps = np.asarray(_timestamps, dtype=float).reshape(-1)
        self.poses = list(_poses)
        if len(self.timestamps) != len(self.poses):
            raise ValueError("Trajectory: " + str(len(self.timestamps)) + " timestamps but " + str(len(self.poses)) +
                             " poses")
        if np.any(np.diff(self.timestamps) <= 0):
            _at = int(np.nonzero(np.diff(self.timestamps) <= 0)[0][0]) + 1
            raise TimestampMismatch("Trajectory: Timestamps must be strictly increasing, record " + str(_at) +
                                    " has " + repr(float(self.timestamps[_at])) + " after " +
                                    repr(float(self.timestamps[_at - 1])))

    @staticmethod
    def from_world_to_camera(_timestamps, _poses):
        """From poses T_k mapping world points into the cameras, as the estimator and the simulator hold them"""
        return Trajectory(_timestamps, [_curr.inverse() for _curr in _poses])

    def __len__(self):
        return len(self.poses)

    def positions(self):
        """The camera positions, N x 3"""
        return np.array([_curr.t for _curr in self.poses]).reshape(-1, 3)

    def transformed(self, _transform):
        """The trajectory moved by a rigid transform of the world, G * P_i"""
        return Trajectory(self.timestamps, [_transform.compose(_curr) for _curr in self.poses])

    def subset(self, _indices):
        return Trajectory(self.timestamps[_indices], [self.poses[_curr] for _curr in _indices])

    def frame_period(self):
        """The median time between records, 0 for a single record"""
        return float(np.median(np.diff(self.timestamps))) if len(self) > 1 else 0.0


@dataclass
class AssociationReport:
    """How the records of an estimate were paired with the ground truth"""
    matched: int
    #: Estimated poses without a ground truth partner
    dropped_estimate: int
    #: Ground truth poses without an estimate
    dropped_ground_truth: int
    max_difference: float

    def __str__(self):
        return str(self.matched) + " poses associated, " + str(self.dropped_estimate) + " estimated and " + \
               str(self.dropped_ground_truth) + " ground truth poses dropped (tolerance " + \
               str(self.max_difference) + " s)"


def associate(_estimate, _ground_truth, _max_difference=None):
    """
    Pairs every estimated pose with the ground truth pose nearest in time, within half a frame period of the
    ground truth. Unmatched poses are dropped and counted.

    :return: (matched estimate, matched ground truth, AssociationReport)
    """
    if _max_difference is None:
        _max_difference = 0.5 * _ground_truth.frame_period()
    _gt_times = _ground_truth.timestamps
    _est_indices, _gt_indices = [], []
    _used = set()
    for _curr, _curr_time in enumerate(_estimate.timestamps):
        _right = int(np.searchsorted(_gt_times, _curr_time))
        _candidates = [_idx for _idx in (_right - 1, _right) if 0 <= _idx < len(_gt_times)]
        if not _candidates:
            continue
        _nearest = min(_candidates, key=lambda _idx: abs(_gt_times[_idx] - _curr_time))
        if abs(_gt_times[_nearest] - _curr_time) <= _max_difference and _nearest not in _used:
            _used.add(_nearest)
            _est_indices.append(_curr)
            _gt_indices.append(_nearest)

    if not _est_indices:
        raise TimestampMismatch(write_to_log("associate: No estimated timestamp is within " + str(_max_difference) +
                                             " s of a ground truth timestamp", _category=EC_INVALID,
                                             _severity=SEV_WARNING))
    _report = AssociationReport(matched=len(_est_indices), dropped_estimate=len(_estimate) - len(_est_indices),
                                dropped_ground_truth=len(_ground_truth) - len(_gt_indices),
                                max_difference=_max_difference)
    if _report.dropped_estimate or _report.dropped_ground_truth:
        write_to_log("associate: " + str(_report), _category=EC_INVALID, _severity=SEV_WARNING)
    return _estimate.subset(_est_indices), _ground_truth.subset(_gt_indices), _report


def check_matched(_estimate, _ground_truth):
    """Raises TimestampMismatch unless the trajectories pair up record by record within half a frame period"""
    if len(_estimate) != len(_ground_truth):
        raise TimestampMismatch("check_matched: The estimate has " + str(len(_estimate)) +
                                " poses, the ground truth " + str(len(_ground_truth)))
    _tolerance = max(0.5 * _ground_truth.frame_period(), 1e-9)
    _difference = np.abs(_estimate.timestamps - _ground_truth.timestamps)
    if len(_difference) and np.max(_difference) > _tolerance:
        _at = int(np.argmax(_difference))
        raise TimestampMismatch("check_matched: Record " + str(_at) + " has timestamps " +
                                repr(float(_estimate.timestamps[_at])) + " and " +
                                repr(float(_ground_truth.timestamps[_at])))
