"""Grid sampling of the reachable workspace with singularity margins."""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import DegenerateHalfAngle, DomainError
from .geometry import GeometryParams, JointInput, PlatformPose
from .kinematics import BranchSelector, fk_branch, ik_branch
from .singularity import analytic_jacobians, singularity_margins

CSV_HEADER = ("y1", "y2", "y3", "y", "z", "beta", "m", "n", "q",
              "margin_serial", "margin_parallel", "leg1_margin")


@dataclass(frozen=True)
class SampleGrid:
    """Per-axis ``(min, max, count)``; points are visited in row-major order."""

    axes: tuple

    def __post_init__(self):
        axes = tuple(tuple(ax) for ax in self.axes)
        for lo, hi, count in axes:
            if int(count) != count or count < 2:
                raise ValueError("each axis needs an integer count >= 2")
            if not lo < hi:
                raise ValueError(f"axis bounds must satisfy min < max, got ({lo}, {hi})")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def parse(cls, specs) -> SampleGrid:
        """Build from strings of the form ``"min:max:count"``."""
        axes = []
        for text in specs:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError(f"axis spec must be min:max:count, got {text!r}")
            axes.append((float(parts[0]), float(parts[1]), int(parts[2])))
        return cls(tuple(axes))

    def points(self):
        lines = [np.linspace(lo, hi, int(n)) for lo, hi, n in self.axes]
        return itertools.product(*(line.tolist() for line in lines))

    def __len__(self):
        return math.prod(int(n) for _, _, n in self.axes)


@dataclass(frozen=True)
class WorkspaceRecord:
    pose: PlatformPose
    joints: JointInput
    branch: BranchSelector
    margin_serial: float
    margin_parallel: float
    leg1_alignment_margin: float


def _margins(p, pose, joints, n_sign):
    try:
        J = analytic_jacobians(p, pose, joints, n_sign)
    except DomainError:
        # C3 level with B3: boundary of the f3 domain, treated as singular
        return 0.0, 0.0
    return singularity_margins(J)


def _record(p, pose, joints, branch, n_sign):
    ser, par = _margins(p, pose, joints, n_sign)
    leg1 = 2.0 * p.l2 - abs(pose.z - p.l1)
    return WorkspaceRecord(pose, joints, branch, ser, par, leg1)


def _fk_point(p, branch, pt):
    q_in = JointInput(*pt)
    try:
        sol = fk_branch(p, q_in, branch)
    except DegenerateHalfAngle:
        return None
    if not sol.is_real:
        return None
    return _record(p, sol.pose, q_in, branch, branch.s2)


def _ik_point(p, beta, branch, pt):
    pose = PlatformPose(pt[0], pt[1], beta)
    sol = ik_branch(p, pose, branch)
    if not sol.is_real:
        return None
    n_sign = 1 if sol.z_c3.real >= p.l1 else -1
    return _record(p, pose, sol.joints, branch, n_sign)


def _run(func, points, workers):
    if workers is None or workers <= 1:
        results = [func(pt) for pt in points]
    else:
        points = list(points)
        chunk = max(1, len(points) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map preserves input order, so output is schedule independent
            results = list(pool.map(func, points, chunksize=chunk))
    return [r for r in results if r is not None]


def sample_workspace(p: GeometryParams, grid: SampleGrid, branch: BranchSelector,
                     workers: int | None = None) -> list[WorkspaceRecord]:
    """Forward-kinematics sweep over a joint-space grid ``(y1, y2, y3)``.

    Grid points without a real solution on ``branch`` are dropped.
    """
    if len(grid.axes) != 3:
        raise ValueError("joint grid needs three axes (y1, y2, y3)")
    return _run(partial(_fk_point, p, branch), grid.points(), workers)


def constant_orientation_slice(p: GeometryParams, grid: SampleGrid, beta: float,
                               branch: BranchSelector,
                               workers: int | None = None) -> list[WorkspaceRecord]:
    """Inverse-kinematics sweep over ``(y, z)`` at fixed tilt ``beta``.

    ``branch`` is the working mode ``(u, v, w)``; points are kept when all
    three joints come out real.
    """
    if len(grid.axes) != 2:
        raise ValueError("slice grid needs two axes (y, z)")
    return _run(partial(_ik_point, p, beta, branch), grid.points(), workers)


def _g9(x: float) -> str:
    return format(float(x), ".9g")


def write_csv(records, fh) -> None:
    """Write records in the fixed column layout, 9 significant digits.

    For inverse-kinematics slices the ``m, n, q`` columns hold ``u, v, w``.
    """
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([
            *(_g9(v) for v in r.joints.as_tuple()),
            *(_g9(v) for v in r.pose.as_tuple()),
            *(str(s) for s in r.branch.as_tuple()),
            _g9(r.margin_serial), _g9(r.margin_parallel), _g9(r.leg1_alignment_margin),
        ])


def to_csv(records) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()
