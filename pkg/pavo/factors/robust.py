"""
The robust module holds the Huber loss and the configuration of the robust losses and the factor balance.

Residuals are whitened before they reach the loss, the Huber loss is applied to the norm of the whitened
residual vector and its IRLS weight scales the whole factor in the normal equations.

Created on Feb 3, 2016

@author: Nicklas Boerjesson
"""
import math
from dataclasses import dataclass

import numpy as np

__author__ = 'Nicklas Borjesson'

#: 95% chi-square quantiles, 3 DoF (stereo reprojection) and 2 DoF (tangential normal residual)
chi2_3dof_95 = 7.815
chi2_2dof_95 = 5.991


def huber(r, delta):
    """
    The Huber loss, rho(r) = r^2 for |r| <= delta, else 2 delta |r| - delta^2.

    :param r: A residual (norm), scalar or array
    :param delta: The threshold, > 0
    :return: (cost, weight), weight is the IRLS weight rho'(r) / 2r, 1 at r = 0
    """
    if not delta > 0:
        raise ValueError("huber: delta must be positive, got " + str(delta))
    _abs = np.abs(np.asarray(r, dtype=float))
    _quadratic = _abs <= delta
    _cost = np.where(_quadratic, _abs * _abs, 2.0 * delta * _abs - delta * delta)
    _weight = np.where(_quadratic, 1.0, delta / np.where(_quadratic, 1.0, _abs))
    if _cost.ndim == 0:
        return float(_cost), float(_weight)
    return _cost, _weight


@dataclass(frozen=True)
class RobustLossConfig:
    """Huber thresholds on whitened residual norms and lambda, the information weight of the normal factor"""
    delta_repro: float = math.sqrt(chi2_3dof_95)
    delta_normal: float = math.sqrt(chi2_2dof_95)
    normal_weight: float = 1e4

    def __post_init__(self):
        if not (self.delta_repro > 0 and self.delta_normal > 0 and self.normal_weight >= 0):
            raise ValueError("RobustLossConfig: deltas must be positive and lambda non-negative, got " + str(self))

    @staticmethod
    def from_run_config(_config):
        return RobustLossConfig(delta_repro=_config["huber_delta_repro"],
                                delta_normal=_config["huber_delta_normal"],
                                normal_weight=_config["normal_weight"])
