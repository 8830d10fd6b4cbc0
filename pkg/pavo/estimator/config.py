"""
The config module holds the solver configuration and the errors of the estimator.

Created on Feb 4, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass, field

from pavo.common.errors import PavoError, EXIT_ESTIMATOR, EXIT_USAGE
from pavo.common.logging import EC_TRACKING, EC_NUMERIC, EC_MAPPING
from pavo.factors.robust import RobustLossConfig, chi2_3dof_95

__author__ = 'Nicklas Borjesson'


class EstimatorError(PavoError):
    """Base of the estimator failures"""
    category = EC_MAPPING
    exit_code = EXIT_ESTIMATOR


class TrackingLost(EstimatorError):
    """A frame could not be tracked, the frame id is kept in .frame_id"""
    category = EC_TRACKING

    def __init__(self, _message, _frame_id=None):
        super(TrackingLost, self).__init__(_message)
        self.frame_id = _frame_id


class SolverDiverged(EstimatorError):
    """The damping passed its ceiling without a cost decrease"""
    category = EC_NUMERIC


class InsufficientKeyframes(EstimatorError):
    """Bundle adjustment needs at least two keyframes"""
    exit_code = EXIT_USAGE


@dataclass(frozen=True)
class SolverConfig:
    """Everything the estimator is configured by, the defaults match ref://pavo.run_config"""
    max_iterations: int = 20
    initial_damping: float = 1e-4
    damping_factor: float = 10.0
    damping_max: float = 1e10
    step_tolerance: float = 1e-8
    cost_tolerance: float = 1e-10
    chi2_threshold: float = chi2_3dof_95
    normal_init_window: int = 10
    keyframe_inlier_ratio: float = 0.9
    keyframe_max_gap: int = 5
    covisibility_min_shared: int = 15
    local_window: int = 10
    min_tracking_observations: int = 6
    min_inlier_ratio: float = 0.5
    landmark_cull_keyframes: int = 2
    track_with_normal: bool = True
    pixel_sigma: float = 1.0
    min_disparity: float = 0.5
    loss: RobustLossConfig = field(default_factory=RobustLossConfig)

    def __post_init__(self):
        if not (self.max_iterations >= 1 and self.initial_damping > 0 and self.damping_factor > 1 and
                self.damping_max > self.initial_damping and self.step_tolerance > 0 and
                self.cost_tolerance > 0 and self.chi2_threshold > 0 and self.pixel_sigma > 0):
            raise ValueError("SolverConfig: Tolerances, damping and thresholds must be positive, got " + str(self))

    @property
    def observation_weight(self):
        """w = 1 / sigma^2, in 1/px^2"""
        return 1.0 / (self.pixel_sigma * self.pixel_sigma)

    @property
    def normal_weight(self):
        return self.loss.normal_weight

    def with_normal_weight(self, _normal_weight):
        """A copy with another lambda, 0 gives the reprojection-only baseline"""
        return SolverConfig(**dict(self.__dict__, loss=RobustLossConfig(
            delta_repro=self.loss.delta_repro, delta_normal=self.loss.delta_normal, normal_weight=_normal_weight)))

    @staticmethod
    def from_run_config(_config):
        return SolverConfig(max_iterations=_config["max_iterations"],
                            initial_damping=_config["initial_damping"],
                            damping_factor=_config["damping_factor"],
                            damping_max=_config["damping_max"],
                            step_tolerance=_config["step_tolerance"],
                            cost_tolerance=_config["cost_tolerance"],
                            chi2_threshold=_config["chi2_threshold"],
                            normal_init_window=_config["normal_init_window"],
                            keyframe_inlier_ratio=_config["keyframe_inlier_ratio"],
                            keyframe_max_gap=_config["keyframe_max_gap"],
                            covisibility_min_shared=_config["covisibility_min_shared"],
                            local_window=_config["local_window"],
                            min_tracking_observations=_config["min_tracking_observations"],
                            min_inlier_ratio=_config["min_inlier_ratio"],
                            landmark_cull_keyframes=_config["landmark_cull_keyframes"],
                            track_with_normal=_config["track_with_normal"],
                            pixel_sigma=_config["pixel_sigma"],
                            min_disparity=_config["min_disparity"],
                            loss=RobustLossConfig.from_run_config(_config))
