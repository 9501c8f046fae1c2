"""Velocity Jacobians and singularity classification.

Differentiating the three closure equations in time gives ``A t + B rho_dot = 0``
with ``t = (y_dot, z_dot, beta_dot)`` and ``rho_dot`` the actuator rates. ``A``
(parallel Jacobian) is lower triangular and ``B`` (serial Jacobian) diagonal,
so both determinants are products of diagonal entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DomainError, SingularError
from .geometry import GeometryParams, JointInput, PlatformPose
from .kinematics import constraint_residuals, coupler_height

REGULAR, SERIAL, PARALLEL, BOTH = "Regular", "Serial", "Parallel", "Both"
DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class JacobianPair:
    A: np.ndarray
    B: np.ndarray

    def det_parallel(self) -> float:
        return float(self.A[0, 0] * self.A[1, 1] * self.A[2, 2])

    def det_serial(self) -> float:
        return float(self.B[0, 0] * self.B[1, 1] * self.B[2, 2])

    def row_scales(self) -> np.ndarray:
        """Largest absolute entry of each row of the stacked matrix [A | B]."""
        return np.max(np.abs(np.hstack([self.A, self.B])), axis=1)


@dataclass(frozen=True)
class SingularityClass:
    kind: str
    serial_cases: frozenset = field(default_factory=frozenset)
    parallel_cases: frozenset = field(default_factory=frozenset)


def _check_domain(p: GeometryParams, y: float, y3: float) -> None:
    if abs(y - y3) >= p.l5:
        raise DomainError(
            f"|y - y3| = {abs(y - y3):.6g} >= l5 = {p.l5:.6g}: "
            "C3 on the base plane, Jacobian entries unbounded")


def analytic_jacobians(p: GeometryParams, pose: PlatformPose, q_in: JointInput,
                       n_sign: int) -> JacobianPair:
    """Closed-form A and B on coupler branch ``n_sign``."""
    y, z, beta = pose.y, pose.z, pose.beta
    y1, y2, y3 = q_in.as_tuple()
    _check_domain(p, y, y3)
    z_c3 = coupler_height(p, y, y3, n_sign)
    z_f = z + p.l7 * math.sin(beta)
    root = math.sqrt(p.l5 ** 2 - (y - y3) ** 2)
    dzf = z_c3 - z_f
    sb, cb = math.sin(beta), math.cos(beta)

    A = np.zeros((3, 3))
    A[0, 0] = -2.0 * (y1 - y)
    A[1, 0] = 2.0 * (y + p.l3 - y2)
    A[1, 1] = 2.0 * (z - p.l1)
    A[2, 0] = n_sign * 2.0 * dzf * (y3 - y) / root
    A[2, 1] = -2.0 * dzf
    A[2, 2] = -2.0 * p.l7 * sb * (-2.0 * p.a + p.l7 * cb) - 2.0 * p.l7 * cb * dzf

    B = np.zeros((3, 3))
    B[0, 0] = 2.0 * (y1 - y)
    B[1, 1] = 2.0 * (y2 - y - p.l3)
    B[2, 2] = n_sign * 2.0 * dzf * (y - y3) / root
    return JacobianPair(A, B)


def fd_jacobians(p: GeometryParams, pose: PlatformPose, q_in: JointInput,
                 n_sign: int, h: float = 1e-5) -> JacobianPair:
    """Central-difference estimate of A and B from ``constraint_residuals``."""
    if not h > 0:
        raise ValueError("step h must be positive")
    _check_domain(p, pose.y, q_in.y3)
    x = np.array(pose.as_tuple() + q_in.as_tuple(), dtype=float)

    def f(v):
        return constraint_residuals(p, PlatformPose(v[0], v[1], v[2]),
                                    JointInput(v[3], v[4], v[5]), n_sign)

    jac = np.empty((3, 6))
    for j in range(6):
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (f(xp) - f(xm)) / (2.0 * h)
    return JacobianPair(jac[:, :3].copy(), jac[:, 3:].copy())


def near_zero_factors(J: JacobianPair, eps: float = DEFAULT_EPS):
    """Indices of diagonal factors of A and of B that are numerically zero."""
    scales = J.row_scales()
    par = [i for i in range(3) if abs(J.A[i, i]) <= eps * scales[i]]
    ser = [i for i in range(3) if abs(J.B[i, i]) <= eps * scales[i]]
    return par, ser


def classify_configuration(J: JacobianPair, eps: float = DEFAULT_EPS) -> SingularityClass:
    """Classify from the diagonal factors of the two triangular Jacobians.

    A factor counts as zero when its magnitude is at most ``eps`` times the
    largest entry of its row in ``[A | B]``.
    """
    par, ser = near_zero_factors(J, eps)
    parallel = frozenset(f"f{i + 1}{i + 1}" for i in par)
    serial = frozenset(f"g{i + 1}{i + 1}" for i in ser)
    if parallel and serial:
        kind = BOTH
    elif parallel:
        kind = PARALLEL
    elif serial:
        kind = SERIAL
    else:
        kind = REGULAR
    return SingularityClass(kind, serial, parallel)


def singularity_margins(J: JacobianPair) -> tuple[float, float]:
    """Smallest row-normalised |g_ii| and |f_ii|; zero means singular."""
    scales = J.row_scales()
    ser = par = math.inf
    for i in range(3):
        s = scales[i]
        ser = min(ser, abs(J.B[i, i]) / s if s > 0 else 0.0)
        par = min(par, abs(J.A[i, i]) / s if s > 0 else 0.0)
    return float(ser), float(par)


def platform_velocity(J: JacobianPair, joint_rates, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Platform twist ``(y_dot, z_dot, beta_dot)`` from actuator rates."""
    par, _ = near_zero_factors(J, eps)
    if par:
        names = ", ".join(f"f{i + 1}{i + 1}" for i in par)
        raise SingularError(f"parallel Jacobian singular ({names} ~ 0)")
    rhs = -J.B @ np.asarray(joint_rates, dtype=float)
    return solve_triangular(J.A, rhs, lower=True)
