"""
This package holds the geometric kernel of pavo, the SE(3) algebra and the stereo camera model
"""
from pavo.geometry.lie import PoseSE3, NearPiRotation, skew, transform_point, exp, log, apply_update, \
    exp_rotation, log_rotation
from pavo.geometry.camera import Intrinsics, GeometryError, NonPositiveDepth, DegenerateDisparity, project, \
    project_many, triangulate

__author__ = 'Nicklas Borjesson'
