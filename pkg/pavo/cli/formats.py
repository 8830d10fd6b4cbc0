"""
The formats module reads and writes the plain text files of a dataset directory:

    intrinsics.txt    "fx fy cx cy b" on one line
    traj_gt.txt       one record per frame, "timestamp tx ty tz qx qy qz qw", the camera to world pose
    landmarks.csv     id,x,y,z
    obs.csv           frame_id,landmark_id,uL,v,uR,is_outlier
    normals.csv       frame_id,nx,ny,nz
    config_used.txt   the RunConfig the dataset was simulated with

Numbers are written with 17 significant digits, so reading gives back the identical values.
Text files allow # comment lines and blank lines, CSV files have a header line and no comments.

Frame ids are the 0-based record numbers of traj_gt.txt, which also supplies their timestamps.

Created on Feb 15, 2016

@author: Nicklas Boerjesson
"""
import os

import numpy as np
import pandas as pd

from pavo.common.errors import DataFormatError
from pavo.common.logging import write_to_log, EC_INVALID, SEV_WARNING
from pavo.estimator.frame import FrameObservations
from pavo.evaluation.trajectory import Trajectory
from pavo.geometry.camera import Intrinsics, GeometryError
from pavo.geometry.lie import PoseSE3

__author__ = 'Nicklas Borjesson'

intrinsics_filename = "intrinsics.txt"
trajectory_filename = "traj_gt.txt"
landmarks_filename = "landmarks.csv"
observations_filename = "obs.csv"
normals_filename = "normals.csv"
config_filename = "config_used.txt"

landmark_columns = ["id", "x", "y", "z"]
observation_columns = ["frame_id", "landmark_id", "uL", "v", "uR", "is_outlier"]
normal_columns = ["frame_id", "nx", "ny", "nz"]

#: Quaternions further than this from unit length are renormalized with a warning
quaternion_tolerance = 1e-6

_float_format = "%.17g"


def _format(_value):
    return _float_format % _value


def _data_lines(_filename):
    """(line number, fields) of every line that is not blank or a comment"""
    with open(_filename, "r", encoding="utf-8") as _file:
        for _line_number, _line in enumerate(_file, start=1):
            _line = _line.strip()
            if _line and not _line.startswith("#"):
                yield _line_number, _line.split()


def _parse_floats(_fields, _count, _filename, _line_number):
    if len(_fields) != _count:
        raise DataFormatError("Expected " + str(_count) + " values, got " + str(len(_fields)), _filename, _line_number)
    try:
        _values = [float(_curr) for _curr in _fields]
    except ValueError as e:
        raise DataFormatError(str(e), _filename, _line_number)
    if not np.all(np.isfinite(_values)):
        raise DataFormatError("Non-finite value", _filename, _line_number)
    return _values


def write_intrinsics(_filename, _intrinsics):
    with open(_filename, "w", encoding="utf-8") as _file:
        _file.write("# fx fy cx cy b\n" + " ".join([_format(_curr) for _curr in _intrinsics.as_tuple()]) + "\n")


def read_intrinsics(_filename):
    _lines = list(_data_lines(_filename))
    if len(_lines) != 1:
        raise DataFormatError("Expected exactly one line of intrinsics, got " + str(len(_lines)), _filename)
    _line_number, _fields = _lines[0]
    try:
        return Intrinsics(*_parse_floats(_fields, 5, _filename, _line_number))
    except GeometryError as e:
        raise DataFormatError(str(e), _filename, _line_number)


def write_trajectory(_filename, _trajectory):
    """Writes a Trajectory, quaternions in (x, y, z, w) order"""
    _lines = ["# timestamp tx ty tz qx qy qz qw"]
    for _curr_time, _curr_pose in zip(_trajectory.timestamps, _trajectory.poses):
        _lines.append(" ".join([_format(_curr) for _curr in
                                [_curr_time] + list(_curr_pose.t) + list(_curr_pose.as_quaternion())]))
    with open(_filename, "w", encoding="utf-8") as _file:
        _file.write("\n".join(_lines) + "\n")


def read_trajectory(_filename):
    """
    Reads a trajectory file, quaternions that are not unit length within quaternion_tolerance are
    renormalized with a warning.

    :return: A Trajectory
    """
    _timestamps, _poses = [], []
    for _line_number, _fields in _data_lines(_filename):
        _values = _parse_floats(_fields, 8, _filename, _line_number)
        _quaternion = np.array(_values[4:])
        _norm = np.linalg.norm(_quaternion)
        if not _norm > 0:
            raise DataFormatError("Zero quaternion", _filename, _line_number)
        if abs(_norm - 1.0) > quaternion_tolerance:
            write_to_log(_filename + ":" + str(_line_number) + ": Quaternion norm " + str(_norm) + ", renormalized",
                         _category=EC_INVALID, _severity=SEV_WARNING)
        if _timestamps and not _values[0] > _timestamps[-1]:
            raise DataFormatError("Timestamps must be strictly increasing", _filename, _line_number)
        _timestamps.append(_values[0])
        _poses.append(PoseSE3.from_quaternion(_values[1:4], _quaternion / _norm))
    return Trajectory(_timestamps, _poses)


def _write_csv(_filename, _frame):
    _frame.to_csv(_filename, index=False, float_format=_float_format, lineterminator="\n")


def _read_csv(_filename, _columns, _integer_columns):
    """
    Reads a CSV file with a fixed header. Errors name the line number of the file.

    :return: A DataFrame, the integer columns as int64, the others as float
    """
    try:
        _frame = pd.read_csv(_filename, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.ParserError as e:
        raise DataFormatError(str(e).strip(), _filename)
    except pd.errors.EmptyDataError:
        raise DataFormatError("The file is empty", _filename, 1)
    if list(_frame.columns) != _columns:
        raise DataFormatError("Expected the header " + ",".join(_columns) + ", got " + ",".join(_frame.columns),
                              _filename, 1)
    _result = pd.DataFrame(index=_frame.index)
    for _curr_column in _columns:
        _convert = int if _curr_column in _integer_columns else float
        _values = []
        for _row, _curr_text in enumerate(_frame[_curr_column].tolist()):
            try:
                _value = _convert(_curr_text)
            except (ValueError, TypeError):
                _value = None
            if _value is None or not np.isfinite(_value):
                # The header is line 1
                raise DataFormatError("Invalid " + _curr_column + " value \"" + str(_curr_text) + "\"",
                                      _filename, _row + 2)
            _values.append(_value)
        _result[_curr_column] = np.array(_values, dtype=np.int64 if _convert is int else float)
    return _result


def write_landmarks(_filename, _ids, _positions):
    _write_csv(_filename, pd.DataFrame({"id": np.asarray(_ids, dtype=np.int64), "x": _positions[:, 0],
                                        "y": _positions[:, 1], "z": _positions[:, 2]}, columns=landmark_columns))


def read_landmarks(_filename):
    """:return: (ids, N x 3 positions)"""
    _frame = _read_csv(_filename, landmark_columns, ["id"])
    return _frame["id"].to_numpy(), _frame[["x", "y", "z"]].to_numpy()


def write_observations(_filename, _frames):
    """Writes the observations of FrameObservations, frames without outlier labels are written as inliers"""
    _parts = []
    for _curr in _frames:
        _labels = _curr.is_outlier if _curr.is_outlier is not None else np.zeros(len(_curr), dtype=bool)
        _parts.append(pd.DataFrame({"frame_id": np.full(len(_curr), _curr.frame_id, dtype=np.int64),
                                    "landmark_id": _curr.landmark_ids, "uL": _curr.pixels[:, 0],
                                    "v": _curr.pixels[:, 1], "uR": _curr.pixels[:, 2],
                                    "is_outlier": _labels.astype(np.int64)}, columns=observation_columns))
    _write_csv(_filename, pd.concat(_parts, ignore_index=True) if _parts else
               pd.DataFrame(columns=observation_columns))


def write_normals(_filename, _frames):
    _rows = [[_curr.frame_id] + list(_curr.normal) for _curr in _frames if _curr.normal is not None]
    _frame = pd.DataFrame(_rows, columns=normal_columns)
    _frame["frame_id"] = _frame["frame_id"].astype(np.int64)
    _write_csv(_filename, _frame)


def read_frames(_observations_filename, _normals_filename, _timestamps):
    """
    Builds the observation stream of a dataset.

    :param _timestamps: The timestamp of every frame, frame ids index into it
    :return: A list of FrameObservations, one per timestamp, frames without observations are empty
    """
    _obs = _read_csv(_observations_filename, observation_columns, ["frame_id", "landmark_id", "is_outlier"])
    _count = len(_timestamps)
    _out_of_range = (_obs["frame_id"] < 0) | (_obs["frame_id"] >= _count)
    if _out_of_range.any():
        _row = int(np.nonzero(_out_of_range.to_numpy())[0][0])
        raise DataFormatError("Frame id " + str(_obs["frame_id"].iloc[_row]) + " is not one of the " + str(_count) +
                              " frames of the trajectory", _observations_filename, _row + 2)
    if (_obs["frame_id"].diff().fillna(0) < 0).any():
        _row = int(np.nonzero((_obs["frame_id"].diff().fillna(0) < 0).to_numpy())[0][0])
        raise DataFormatError("Observations must be ordered by frame id", _observations_filename, _row + 2)

    _normals = {}
    if _normals_filename is not None and os.path.exists(_normals_filename):
        _table = _read_csv(_normals_filename, normal_columns, ["frame_id"])
        for _row, (_curr_id, _nx, _ny, _nz) in enumerate(_table.itertuples(index=False)):
            _normal = np.array([_nx, _ny, _nz])
            if not 0 <= _curr_id < _count or abs(np.linalg.norm(_normal) - 1.0) > 1e-6 or not _nz < 0:
                raise DataFormatError("Invalid frame normal, frame ids index the trajectory and normals are unit "
                                      "vectors with negative z", _normals_filename, _row + 2)
            _normals[int(_curr_id)] = _normal / np.linalg.norm(_normal)

    _grouped = dict((int(_curr_id), _curr_group) for _curr_id, _curr_group in _obs.groupby("frame_id", sort=True))
    _frames = []
    for _curr_id in range(_count):
        _group = _grouped.get(_curr_id)
        if _group is None:
            _ids, _pixels, _labels = np.zeros(0, dtype=np.int64), np.zeros((0, 3)), np.zeros(0, dtype=bool)
        else:
            _ids = _group["landmark_id"].to_numpy()
            _pixels = _group[["uL", "v", "uR"]].to_numpy()
            _labels = _group["is_outlier"].to_numpy() != 0
        _frames.append(FrameObservations(frame_id=_curr_id, timestamp=float(_timestamps[_curr_id]),
                                         landmark_ids=_ids, pixels=_pixels, normal=_normals.get(_curr_id),
                                         is_outlier=_labels))
    return _frames


class Dataset(object):
    """The contents of a dataset directory"""

    def __init__(self, _directory):
        self.directory = _directory
        for _curr in [intrinsics_filename, trajectory_filename, observations_filename]:
            if not os.path.exists(os.path.join(_directory, _curr)):
                raise DataFormatError("The dataset has no " + _curr, os.path.join(_directory, _curr))
        self.intrinsics = read_intrinsics(self.path(intrinsics_filename))
        self.ground_truth = read_trajectory(self.path(trajectory_filename))
        self.frames = read_frames(self.path(observations_filename), self.path(normals_filename),
                                  self.ground_truth.timestamps)

    def path(self, _filename):
        return os.path.join(self.directory, _filename)

    @property
    def config_filename(self):
        _filename = self.path(config_filename)
        return _filename if os.path.exists(_filename) else None
