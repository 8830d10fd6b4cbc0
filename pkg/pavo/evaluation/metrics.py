"""
The metrics module holds the trajectory alignment and the error metrics: the absolute trajectory error (ATE)
and the relative distance error (RDE). Both only measure the x and y components of the translation,
in the camera frame.

Created on Feb 11, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass

import numpy as np

from pavo.common.logging import write_to_log, EC_INVALID, SEV_ERROR
from pavo.evaluation.trajectory import TooFewPoses, SequenceTooShort, check_matched, associate
from pavo.geometry.lie import PoseSE3

__author__ = 'Nicklas Borjesson'

#: The default frame step of the relative distance error
default_delta = 20
align_modes = ["3d", "2d"]


class MetricReport(object):
    """A per-frame error series and its statistics, in meters"""

    def __init__(self, _errors):
        self.errors = np.asarray(_errors, dtype=float).reshape(-1)

    def __len__(self):
        return len(self.errors)

    @property
    def mean(self):
        return float(np.mean(self.errors)) if len(self.errors) else float("nan")

    @property
    def median(self):
        return float(np.median(self.errors)) if len(self.errors) else float("nan")

    @property
    def rmse(self):
        return float(np.sqrt(np.mean(self.errors * self.errors))) if len(self.errors) else float("nan")

    @property
    def sd(self):
        """The population standard deviation, sd^2 = rmse^2 - mean^2"""
        return float(np.std(self.errors)) if len(self.errors) else float("nan")

    @property
    def max(self):
        return float(np.max(self.errors)) if len(self.errors) else float("nan")

    def as_dict(self):
        return {"mean": self.mean, "median": self.median, "rmse": self.rmse, "sd": self.sd, "count": len(self)}

    @staticmethod
    def pooled(_reports):
        """One report over the concatenated error series"""
        return MetricReport(np.concatenate([_curr.errors for _curr in _reports]) if _reports else [])

    def __repr__(self):
        return "MetricReport(mean=" + str(self.mean) + ", median=" + str(self.median) + ", rmse=" + str(self.rmse) + \
               ", sd=" + str(self.sd) + ", count=" + str(len(self)) + ")"


def _check_alignable(_estimate, _ground_truth):
    check_matched(_estimate, _ground_truth)
    if len(_estimate) < 3:
        raise TooFewPoses(write_to_log("align: Alignment needs at least 3 poses, got " + str(len(_estimate)),
                                       _category=EC_INVALID, _severity=SEV_ERROR))


def align(_estimate, _ground_truth, _mode="3d"):
    """
    The rigid transform S (no scale) minimizing sum |t_i - S t_i_gt|^2 over the camera positions, in closed form.
    In "2d" mode the rotation is restricted to rotations about the z axis.

    :param _estimate: The estimated Trajectory
    :param _ground_truth: The ground truth Trajectory, matched record by record
    :param _mode: "3d" or "2d"
    :return: S as a PoseSE3, mapping ground truth world points into the estimate world
    """
    if _mode not in align_modes:
        raise ValueError("align: Unknown mode \"" + str(_mode) + "\", use one of " + ", ".join(align_modes))
    _check_alignable(_estimate, _ground_truth)
    _data = _estimate.positions()
    _model = _ground_truth.positions()
    _data_mean = np.mean(_data, axis=0)
    _model_mean = np.mean(_model, axis=0)
    _data_centered = _data - _data_mean
    _model_centered = _model - _model_mean

    if _mode == "3d":
        _U, _, _Vh = np.linalg.svd(_data_centered.T @ _model_centered)
        _D = np.eye(3)
        if np.linalg.det(_U) * np.linalg.det(_Vh) < 0:
            _D[2, 2] = -1
        _R = _U @ _D @ _Vh
    else:
        _W = _data_centered[:, :2].T @ _model_centered[:, :2]
        _angle = np.arctan2(_W[1, 0] - _W[0, 1], _W[0, 0] + _W[1, 1])
        _c, _s = np.cos(_angle), np.sin(_angle)
        _R = np.array([[_c, -_s, 0.0], [_s, _c, 0.0], [0.0, 0.0, 1.0]])
    return PoseSE3(_R, _data_mean - _R @ _model_mean)


def ate(_estimate, _ground_truth, _alignment):
    """
    The absolute trajectory error of every frame, |Pi(P_i^-1 S P_i_gt)|, Pi taking the x and y components
    of the translation.

    :return: A MetricReport
    """
    _check_alignable(_estimate, _ground_truth)
    _errors = []
    for _curr_est, _curr_gt in zip(_estimate.poses, _ground_truth.poses):
        _relative = _curr_est.inverse().compose(_alignment.compose(_curr_gt))
        _errors.append(np.linalg.norm(_relative.t[:2]))
    return MetricReport(_errors)


def _travelled(_trajectory, _delta):
    """|Pi(P_i^-1 P_i+delta)| for i = 0 .. N - delta - 1"""
    return np.array([np.linalg.norm(_trajectory.poses[_curr].inverse().compose(
        _trajectory.poses[_curr + _delta]).t[:2]) for _curr in range(len(_trajectory) - _delta)])


def rde(_estimate, _ground_truth, _delta=default_delta):
    """
    The relative distance error, the difference of the distance travelled over _delta frames,
    | |Pi(P_i^-1 P_i+d)| - |Pi(P_i_gt^-1 P_i+d_gt)| |.

    :return: A MetricReport with N - _delta errors
    """
    check_matched(_estimate, _ground_truth)
    if _delta < 1:
        raise ValueError("rde: The frame step must be at least 1, got " + str(_delta))
    if len(_estimate) <= _delta:
        raise SequenceTooShort(write_to_log("rde: " + str(len(_estimate)) + " poses, more than " + str(_delta) +
                                            " are needed", _category=EC_INVALID, _severity=SEV_ERROR))
    return MetricReport(np.abs(_travelled(_estimate, _delta) - _travelled(_ground_truth, _delta)))


@dataclass
class EvaluationResult:
    ate: MetricReport
    rde: MetricReport
    alignment: PoseSE3
    #: The timestamps of the associated frames
    timestamps: np.ndarray
    association: object
    delta: int


def evaluate(_estimate, _ground_truth, _delta=default_delta, _mode="3d"):
    """
    Associates an estimate with its ground truth, aligns them and computes both metrics

    :return: An EvaluationResult
    """
    _estimate, _ground_truth, _association = associate(_estimate, _ground_truth)
    _alignment = align(_estimate, _ground_truth, _mode)
    return EvaluationResult(ate=ate(_estimate, _ground_truth, _alignment), rde=rde(_estimate, _ground_truth, _delta),
                            alignment=_alignment, timestamps=_estimate.timestamps, association=_association,
                            delta=_delta)
