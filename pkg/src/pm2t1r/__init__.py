"""Kinematics and design analysis of a 3-DOF 2T1R parallel mechanism."""

from .errors import (DegenerateHalfAngle, DomainError, Infeasible, KinematicsError,
                     NotReal, SingularError)
from .geometry import GeometryParams, JointInput, PlatformPose, load_params, validate_params
from .kinematics import (ALL_BRANCHES, BranchSelector, KinematicSolution, constraint_residuals,
                         fk_branch, fk_enumerate, ik_branch, ik_enumerate, mechanism_points)
from .singularity import (JacobianPair, SingularityClass, analytic_jacobians,
                          classify_configuration, fd_jacobians, platform_velocity)

__version__ = "0.1.0"

__all__ = [
    "ALL_BRANCHES", "BranchSelector", "DegenerateHalfAngle", "DomainError",
    "GeometryParams", "Infeasible", "JacobianPair", "JointInput", "KinematicSolution",
    "KinematicsError", "NotReal", "PlatformPose", "SingularError", "SingularityClass",
    "analytic_jacobians", "classify_configuration", "constraint_residuals",
    "fd_jacobians", "fk_branch", "fk_enumerate", "ik_branch", "ik_enumerate",
    "load_params", "mechanism_points", "platform_velocity", "validate_params",
]
