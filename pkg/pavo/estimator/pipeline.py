"""
The pipeline module runs the estimator over an observation stream, frame by frame: tracking, the keyframe
decision, and keyframe insertion followed by local bundle adjustment and landmark culling.

Created on Feb 8, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass, field
from typing import List

from pavo.common.internal import timed
from pavo.common.logging import write_to_log, EC_TRACKING, EC_NOTIFICATION, SEV_INFO, SEV_ERROR
from pavo.estimator.config import TrackingLost
from pavo.estimator.map import MapState
from pavo.estimator.mapping import insert_keyframe, local_bundle_adjustment, cull_landmarks
from pavo.estimator.tracking import track_frame, select_keyframe
from pavo.geometry.lie import PoseSE3

__author__ = 'Nicklas Borjesson'


@dataclass
class PoseRecord:
    """The estimate of a frame, pose maps world points into the camera frame"""
    frame_id: int
    timestamp: float
    pose: PoseSE3
    is_keyframe: bool = False


@dataclass
class SequenceResult:
    #: One record per frame, in stream order
    poses: List[PoseRecord]
    map: MapState
    #: The BAReports of every local bundle adjustment
    ba_reports: list = field(default_factory=list)
    #: The TrackingResults of every tracked frame
    tracking: list = field(default_factory=list)

    @property
    def keyframe_count(self):
        return len(self.map.keyframes)


@timed("mapping")
def _map_keyframe(_map, _frame, _pose, _inliers, _K, _config):
    _keyframe = insert_keyframe(_map, _frame, _pose, _inliers, _K, _config)
    _report = None
    if len(_map.keyframes) >= 2:
        _report = local_bundle_adjustment(_map, _keyframe.id, _K, _config)
        cull_landmarks(_map, _config)
    return _keyframe, _report


def run_sequence(_frames, _K, _config, _process_id=None):
    """
    Estimates the trajectory of an observation stream. The first frame defines the world frame.
    Keyframe poses are reported as refined by bundle adjustment, other frames keep their tracked poses.

    :param _frames: FrameObservations ordered by frame id
    :param _K: The Intrinsics
    :param _config: A SolverConfig
    :param _process_id: Identifies the run in log messages
    :return: A SequenceResult
    """
    _map = MapState(_config.normal_init_window)
    _records = []
    _ba_reports = []
    _tracking = []
    # The frame ids of the last two frames, for the motion model
    _history = []
    _last_frame_id = None

    def _current_pose(_record):
        _keyframe = _map.keyframes.get(_record.frame_id)
        return _record.pose if _keyframe is None else _keyframe.pose

    for _curr_frame in _frames:
        if _last_frame_id is not None and _curr_frame.frame_id <= _last_frame_id:
            raise ValueError("run_sequence: Frames must be ordered by increasing frame id, " +
                             str(_curr_frame.frame_id) + " follows " + str(_last_frame_id))
        _last_frame_id = _curr_frame.frame_id

        if not _map.keyframes:
            _pose = PoseSE3.identity()
            _inliers = [False] * len(_curr_frame)
            _is_keyframe = True
        else:
            try:
                _result = track_frame(_map, _curr_frame, [_current_pose(_curr) for _curr in _history], _K, _config)
            except TrackingLost:
                write_to_log("run_sequence: Tracking lost at frame " + str(_curr_frame.frame_id),
                             _category=EC_TRACKING, _severity=SEV_ERROR, _process_id=_process_id,
                             _frame_id=_curr_frame.frame_id)
                raise
            _tracking.append(_result)
            _pose = _result.pose
            _inliers = _result.inliers
            _is_keyframe = select_keyframe(_map, _curr_frame.frame_id, _result.inlier_count, _config)

        if _is_keyframe:
            _keyframe, _report = _map_keyframe(_map, _curr_frame, _pose, _inliers, _K, _config)
            if _report is not None:
                _ba_reports.append(_report)

        _record = PoseRecord(frame_id=_curr_frame.frame_id, timestamp=_curr_frame.timestamp, pose=_pose,
                             is_keyframe=_is_keyframe)
        _records.append(_record)
        _history = (_history + [_record])[-2:]

    for _curr in _records:
        if _curr.is_keyframe:
            _curr.pose = _map.keyframes[_curr.frame_id].pose

    write_to_log("run_sequence: " + str(len(_records)) + " frames, " + str(len(_map.keyframes)) + " keyframes, " +
                 str(len(_map.landmarks)) + " landmarks", _category=EC_NOTIFICATION, _severity=SEV_INFO,
                 _process_id=_process_id)
    return SequenceResult(poses=_records, map=_map, ba_reports=_ba_reports, tracking=_tracking)
