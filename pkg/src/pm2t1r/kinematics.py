"""Closed-form forward and inverse kinematics over all eight branches.

Forward kinematics is triangular: ``y`` depends on ``y1`` only, ``z`` on
``(y1, y2)`` and ``beta`` on all three inputs. Each of the three stages
introduces one square root, hence one sign (``m, n, q`` for FK, ``u, v, w``
for IK) and eight candidate solutions.

A negative radicand is not an error. The principal imaginary root is
propagated so that complex candidates can be reported; downstream modules
keep only solutions with ``is_real`` set.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHalfAngle, DomainError, NotReal
from .geometry import GeometryParams, JointInput, PlatformPose, wrap_angle

EPS_REAL = 1e-9


@dataclass(frozen=True)
class BranchSelector:
    """Sign triple: ``(m, n, q)`` for FK or ``(u, v, w)`` for IK."""

    s1: int
    s2: int
    s3: int

    def __post_init__(self):
        for s in (self.s1, self.s2, self.s3):
            if s not in (1, -1) or isinstance(s, bool):
                raise ValueError(f"branch signs must be +1 or -1, got {s!r}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.s1, self.s2, self.s3)

    @classmethod
    def parse(cls, text: str) -> BranchSelector:
        """Parse ``"+1,-1,+1"`` (also accepts ``"+,-,+"``)."""
        parts = [t.strip() for t in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"branch needs three comma-separated signs, got {text!r}")
        signs = []
        for t in parts:
            if t in ("+", "+1", "1"):
                signs.append(1)
            elif t in ("-", "-1"):
                signs.append(-1)
            else:
                raise ValueError(f"invalid branch sign {t!r}")
        return cls(*signs)

    def __str__(self):
        return ",".join(f"{s:+d}" for s in self.as_tuple())


ALL_BRANCHES = tuple(BranchSelector(*s) for s in itertools.product((1, -1), repeat=3))


@dataclass(eq=False, slots=True)
class KinematicSolution:
    """One FK or IK candidate.

    ``values`` holds real parts: pose ``(y, z, beta)`` for FK, joints
    ``(y1, y2, y3)`` for IK. ``imag`` holds the matching imaginary parts.
    ``z_c3`` is the height of the coupler joint C3 on this branch.
    """

    values: np.ndarray
    imag: np.ndarray
    branch: BranchSelector
    is_real: bool
    kind: str  # "pose" or "joints"
    z_c3: complex = complex("nan")
    degenerate: bool = False

    @property
    def pose(self) -> PlatformPose:
        if self.kind != "pose":
            raise TypeError("solution holds joint values, not a pose")
        if not self.is_real:
            raise NotReal(f"branch {self.branch} is complex")
        return PlatformPose(*self.values)

    @property
    def joints(self) -> JointInput:
        if self.kind != "joints":
            raise TypeError("solution holds a pose, not joint values")
        if not self.is_real:
            raise NotReal(f"branch {self.branch} is complex")
        return JointInput(*self.values)

    def complex_values(self) -> np.ndarray:
        return self.values + 1j * self.imag


def _pack(raw, branches, kind) -> list[KinematicSolution]:
    """Wrap ``(values, z_c3, degenerate)`` triples; one array holds all branches."""
    arr = np.array([r[0] for r in raw], dtype=complex)
    re, im = arr.real.copy(), arr.imag.copy()
    ok = (np.abs(im).max(axis=1) <= EPS_REAL).tolist()
    return [KinematicSolution(re[i], im[i], br, ok[i] and not deg, kind, complex(z_c3), deg)
            for i, ((_, z_c3, deg), br) in enumerate(zip(raw, branches))]


def _sqrt(x: float):
    # principal root; imaginary for negative radicands
    if x >= 0.0:
        return math.sqrt(x)
    return 1j * math.sqrt(-x)


def _half_angle_pair(A, B, C, q):
    """Return (numerator, denominator) of tan(beta/2) for sign ``q``.

    The printed form ``(A + q*sqrt(D)) / (B + C)`` and the rationalised form
    ``(C - B) / (A - q*sqrt(D))`` give the same ratio; the pair with the
    larger magnitude is used so the B + C = 0 pole never bites.
    """
    D = A * A + B * B - C * C
    root = cmath.sqrt(D) if isinstance(D, complex) else _sqrt(D)
    n1, d1 = A + q * root, B + C
    n2, d2 = C - B, A - q * root
    if abs(n1) + abs(d1) >= abs(n2) + abs(d2):
        num, den = n1, d1
    else:
        num, den = n2, d2
    if num == 0 and den == 0:
        raise DegenerateHalfAngle("tilt angle undetermined (0/0 in half-angle form)")
    return num, den


def _beta_from_closure(p: GeometryParams, z, z_c3, q):
    dz = z - z_c3
    A = 2.0 * dz * p.l7
    B = -4.0 * p.a * p.l7
    C = p.l6 ** 2 - 4.0 * p.a ** 2 - p.l7 ** 2 - dz * dz
    num, den = _half_angle_pair(A, B, C, q)
    if all(isinstance(v, float) for v in (num, den)):
        return wrap_angle(2.0 * math.atan2(num, den))
    num, den = complex(num), complex(den)
    if den == 0:
        return complex(math.pi, 0.0)
    return 2.0 * cmath.atan(num / den)


def _fk_roots(p: GeometryParams, q_in: JointInput):
    """Branch-independent pieces of FK: y and the two leg square roots."""
    y1, y2, y3 = q_in.y1, q_in.y2, q_in.y3
    d2 = y1 + 2.0 * p.l3 - y2
    d3 = y1 + p.l3 - y3
    return y1 + p.l3, _sqrt(p.l4 * p.l4 - d2 * d2), _sqrt(p.l5 * p.l5 - d3 * d3)


def _fk_solve(p, roots, b):
    y, r2, r3 = roots
    z = p.l1 + b.s1 * r2
    z_c3 = p.l1 + b.s2 * r3
    return (y, z, _beta_from_closure(p, z, z_c3, b.s3)), z_c3, False


def fk_branch(p: GeometryParams, q_in: JointInput, b: BranchSelector) -> KinematicSolution:
    """Forward kinematics on one assembly mode ``b = (m, n, q)``.

    Raises ``DegenerateHalfAngle`` when the tilt angle is undetermined.
    """
    return _pack([_fk_solve(p, _fk_roots(p, q_in), b)], (b,), "pose")[0]


def fk_enumerate(p: GeometryParams, q_in: JointInput) -> list[KinematicSolution]:
    """All eight assembly-mode candidates, ordered lexicographically (+1 first)."""
    roots = _fk_roots(p, q_in)
    raw = []
    for b in ALL_BRANCHES:
        try:
            raw.append(_fk_solve(p, roots, b))
        except DegenerateHalfAngle:
            nan = float("nan")
            raw.append(((nan, nan, nan), complex(nan, nan), True))
    return _pack(raw, ALL_BRANCHES, "pose")


def _ik_roots(p: GeometryParams, pose: PlatformPose):
    """Branch-independent pieces of IK: y1, the leg-2 root, F height and coupler root."""
    y, z, beta = pose.y, pose.z, pose.beta
    dz = z - p.l1
    gap = 2.0 * p.a - p.l7 * math.cos(beta)
    return (y, y - p.l3, _sqrt(p.l4 * p.l4 - dz * dz), z + p.l7 * math.sin(beta),
            _sqrt(p.l6 * p.l6 - gap * gap))


def _leg3_root(p, z_c3):
    h = z_c3 - p.l1
    rad = p.l5 * p.l5 - h * h
    return cmath.sqrt(rad) if isinstance(rad, complex) else _sqrt(rad)


def _ik_solve(p, roots, b, leg3=None):
    y, y1, r2, z_f, r6 = roots
    z_c3 = z_f + b.s3 * r6
    root = _leg3_root(p, z_c3) if leg3 is None else leg3
    return (y1, y + p.l3 + b.s1 * r2, y + b.s2 * root), z_c3, False


def ik_branch(p: GeometryParams, pose: PlatformPose, b: BranchSelector) -> KinematicSolution:
    """Inverse kinematics on one working mode ``b = (u, v, w)``."""
    return _pack([_ik_solve(p, _ik_roots(p, pose), b)], (b,), "joints")[0]


def ik_enumerate(p: GeometryParams, pose: PlatformPose) -> list[KinematicSolution]:
    """All eight working-mode candidates, ordered lexicographically (+1 first)."""
    roots = _ik_roots(p, pose)
    leg3 = {w: _leg3_root(p, roots[3] + w * roots[4]) for w in (1, -1)}
    return _pack([_ik_solve(p, roots, b, leg3[b.s3]) for b in ALL_BRANCHES],
                 ALL_BRANCHES, "joints")


def coupler_height(p: GeometryParams, y: float, y3: float, n_sign: int) -> float:
    """Height of C3 on branch ``n_sign``; raises ``DomainError`` if |y - y3| > l5."""
    d = y - y3
    rad = p.l5 * p.l5 - d * d
    if rad < 0.0:
        raise DomainError(f"|y - y3| = {abs(d):.6g} exceeds l5 = {p.l5:.6g}")
    return p.l1 + n_sign * math.sqrt(rad)


def constraint_residuals(p: GeometryParams, pose: PlatformPose, q_in: JointInput,
                         n_sign: int) -> np.ndarray:
    """Residuals (mm^2) of the three loop-closure equations.

    f1 = (y - y1)^2 - l3^2
    f2 = (y + l3 - y2)^2 + (z - l1)^2 - l4^2
    f3 = (2a - l7 cos beta)^2 + (z_c3 - z_F)^2 - l6^2
    """
    y, z, beta = pose.y, pose.z, pose.beta
    z_c3 = coupler_height(p, y, q_in.y3, n_sign)
    z_f = z + p.l7 * math.sin(beta)
    gap = 2.0 * p.a - p.l7 * math.cos(beta)
    f1 = (y - q_in.y1) ** 2 - p.l3 ** 2
    f2 = (y + p.l3 - q_in.y2) ** 2 + (z - p.l1) ** 2 - p.l4 ** 2
    f3 = gap * gap + (z_c3 - z_f) ** 2 - p.l6 ** 2
    return np.array([f1, f2, f3])


@dataclass(frozen=True)
class MechanismPoints:
    """Joint-centre positions in the base frame (mm)."""

    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    B3: np.ndarray
    C2: np.ndarray
    C3: np.ndarray
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    z_c3: float

    def link_lengths(self) -> dict[str, float]:
        def dist(u, v):
            return float(np.linalg.norm(u - v))
        return {
            "B2C2": dist(self.B2, self.C2),
            "B3C3": dist(self.B3, self.C3),
            "C3F": dist(self.C3, self.F),
            "EF": dist(self.E, self.F),
            "DE": dist(self.D, self.E),
            "EC2": dist(self.E, self.C2),
        }


def mechanism_points(p: GeometryParams, q_in: JointInput,
                     sol: KinematicSolution) -> MechanismPoints:
    """Place every joint centre for a real FK solution."""
    if not sol.is_real:
        raise NotReal(f"branch {sol.branch} is complex")
    if sol.kind != "pose":
        raise TypeError("mechanism_points needs a forward-kinematics solution")
    y, z, beta = (float(v) for v in sol.values)
    y1, y2, y3 = q_in.as_tuple()
    z_c3 = float(sol.z_c3.real)
    a = p.a
    pt = np.array
    return MechanismPoints(
        A1=pt([a, y1, 0.0]), A2=pt([a, y2, 0.0]), A3=pt([-a, y3, 0.0]),
        B1=pt([a, y1, p.l1]), B2=pt([a, y2, p.l1]), B3=pt([-a, y3, p.l1]),
        C2=pt([a, y1 + 2.0 * p.l3, z]), C3=pt([-a, y, z_c3]),
        D=pt([a, y1, z]), E=pt([a, y, z]),
        F=pt([a - p.l7 * math.cos(beta), y, z + p.l7 * math.sin(beta)]),
        z_c3=z_c3,
    )
