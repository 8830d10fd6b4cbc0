"""
The frame module holds the observations of a single frame as they arrive in the observation stream.

Created on Feb 4, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

__author__ = 'Nicklas Borjesson'


@dataclass
class FrameObservations:
    """
    Everything the estimator gets to know about a frame.
    Rows of landmark_ids and pixels correspond, pixels are (uL, v, uR).
    """
    frame_id: int
    timestamp: float
    landmark_ids: np.ndarray
    pixels: np.ndarray
    #: The unit surface normal measured in the camera frame, None if not measured
    normal: Optional[np.ndarray] = None
    #: Ground truth outlier labels of simulated data, never read by the estimator
    is_outlier: Optional[np.ndarray] = None

    def __post_init__(self):
        self.landmark_ids = np.asarray(self.landmark_ids, dtype=np.int64).reshape(-1)
        self.pixels = np.asarray(self.pixels, dtype=float).reshape(-1, 3)
        if len(self.landmark_ids) != len(self.pixels):
            raise ValueError("FrameObservations: " + str(len(self.landmark_ids)) + " landmark ids but " +
                             str(len(self.pixels)) + " pixel rows in frame " + str(self.frame_id))
        if self.normal is not None:
            self.normal = np.asarray(self.normal, dtype=float).reshape(3)
        if self.is_outlier is not None:
            self.is_outlier = np.asarray(self.is_outlier, dtype=bool).reshape(-1)

    def __len__(self):
        return len(self.landmark_ids)

    @property
    def disparities(self):
        return self.pixels[:, 0] - self.pixels[:, 2]
