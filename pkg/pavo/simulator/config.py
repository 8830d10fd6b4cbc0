"""
The config module holds the configuration of the simulated pavement scene.

Created on Feb 9, 2016

@author: Nicklas Boerjesson
"""
import math
from dataclasses import dataclass

from pavo.common.errors import ConfigError
from pavo.geometry.camera import Intrinsics

__author__ = 'Nicklas Borjesson'

trajectory_shapes = ["lawnmower", "straight"]


@dataclass(frozen=True)
class SceneConfig:
    """
    The scene, the flight and the camera. Distances are meters, pixel values are pixels.
    The ground frame has z up, the landmark field is centered on its origin.
    """
    landmark_count: int = 7200
    plane_height: float = 0.0
    roughness: float = 0.01
    extent_x: float = 60.0
    extent_y: float = 20.0
    noise_px: float = 0.5
    outlier_rate: float = 0.05
    outlier_px: float = 50.0
    trajectory_shape: str = "lawnmower"
    trajectory_length: float = 100.0
    rows: int = 2
    row_spacing: float = 6.0
    altitude: float = 5.0
    speed: float = 2.0
    frame_rate: float = 30.0
    attitude_wobble: float = 0.01
    normal_noise_deg: float = 0.3
    seed: int = 42
    fx: float = 400.0
    fy: float = 400.0
    cx: float = 412.0
    cy: float = 224.5
    baseline: float = 0.05
    image_width: int = 824
    image_height: int = 449

    def __post_init__(self):
        def _check(_condition, _key, _message):
            if not _condition:
                raise ConfigError("SceneConfig: " + _key + " " + _message + ", got " + str(getattr(self, _key)),
                                  _key=_key)

        _check(self.landmark_count >= 1, "landmark_count", "must be at least 1")
        _check(self.roughness >= 0, "roughness", "must not be negative")
        for _curr_key in ["extent_x", "extent_y", "trajectory_length", "row_spacing", "altitude", "speed",
                          "frame_rate", "fx", "fy", "baseline", "image_width", "image_height"]:
            _check(getattr(self, _curr_key) > 0, _curr_key, "must be positive")
        _check(self.noise_px >= 0, "noise_px", "must not be negative")
        _check(0.0 <= self.outlier_rate <= 0.5, "outlier_rate", "must be within [0, 0.5]")
        _check(self.outlier_px >= 0, "outlier_px", "must not be negative")
        _check(self.trajectory_shape in trajectory_shapes, "trajectory_shape",
               "must be one of " + ", ".join(trajectory_shapes))
        _check(self.rows >= 1, "rows", "must be at least 1")
        _check(self.attitude_wobble >= 0, "attitude_wobble", "must not be negative")
        _check(self.normal_noise_deg >= 0, "normal_noise_deg", "must not be negative")
        _check(self.seed >= 0, "seed", "must not be negative")
        if self.trajectory_shape == "lawnmower":
            _check(self.row_length > 0, "trajectory_length", "is too short for " + str(self.rows) +
                   " rows with turns of radius " + str(self.turn_radius))

    @property
    def turn_radius(self):
        return self.row_spacing / 2.0

    @property
    def row_length(self):
        """The length of each straight row of the lawn-mower sweep, the turns take up the rest"""
        return (self.trajectory_length - (self.rows - 1) * math.pi * self.turn_radius) / self.rows

    @property
    def frame_count(self):
        return int(round(self.trajectory_length / self.speed * self.frame_rate)) + 1

    def intrinsics(self):
        return Intrinsics(fx=self.fx, fy=self.fy, cx=self.cx, cy=self.cy, b=self.baseline)

    def with_changes(self, **kwargs):
        return SceneConfig(**dict(self.__dict__, **kwargs))

    @staticmethod
    def from_run_config(_config):
        return SceneConfig(**dict((_curr_key, _config[_curr_key]) for _curr_key in SceneConfig.__dataclass_fields__))
