"""
This package holds the estimator: tracking, keyframe management, local bundle adjustment with normal factors
and outlier rejection
"""
from pavo.estimator.config import SolverConfig, EstimatorError, TrackingLost, SolverDiverged, InsufficientKeyframes
from pavo.estimator.frame import FrameObservations
from pavo.estimator.map import Keyframe, Landmark, MapState
from pavo.estimator.tracking import track_frame, select_keyframe, predict_pose, TrackingResult
from pavo.estimator.mapping import insert_keyframe, local_bundle_adjustment, reject_outliers, BAReport
from pavo.estimator.pipeline import run_sequence, SequenceResult, PoseRecord

__author__ = 'Nicklas Borjesson'
