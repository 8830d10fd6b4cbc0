"""
This package holds the factors of the pose and bundle adjustment objectives: residuals, robust losses and
analytic Jacobians
"""
from pavo.factors.robust import huber, RobustLossConfig, chi2_3dof_95, chi2_2dof_95
from pavo.factors.reprojection import StereoObservation, reprojection_residual, reprojection_jacobians, \
    reprojection_residuals, reprojection_jacobians_many, transform_many
from pavo.factors.normal import make_tangent_basis, normal_residual, normal_jacobian, normal_pose_jacobian, \
    check_frame_normal, check_global_normal

__author__ = 'Nicklas Borjesson'
