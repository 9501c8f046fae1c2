import math

import numpy as np
import pytest

from pm2t1r.geometry import GeometryParams, JointInput

REF_JOINTS = (-244.59, 303.32, -252.26)
REF_POSE = (-84.59, 428.72, 0.3045)

_ACCEPTANCE = []


@pytest.fixture
def params():
    return GeometryParams.reference()


@pytest.fixture
def ref_joints():
    return JointInput(*REF_JOINTS)


@pytest.fixture
def acceptance_log():
    """Record one line per acceptance criterion for the terminal summary."""
    def log(number, title, passed, detail):
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE.append(f"[{status}] criterion {number}: {title} -- {detail}")
    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def feasible_joints(rng, p, margin=1.0):
    """Joint triple whose three radicands all stay at least ``margin`` mm inside their domain.

    y2 and y3 are drawn as offsets from the points where the leg radicands
    peak, so both leg square roots are real and bounded away from zero.
    """
    y1 = rng.uniform(-600.0, 600.0)
    s2 = rng.choice((-1.0, 1.0))
    s3 = rng.choice((-1.0, 1.0))
    d2 = rng.uniform(margin, p.l4 - margin)
    d3 = rng.uniform(margin, p.l5 - margin)
    return JointInput(y1, y1 + 2.0 * p.l3 - s2 * d2, y1 + p.l3 - s3 * d3)


def feasible_joint_batch(rng, p, count, margin=1.0):
    """``count`` joint triples drawn like :func:`feasible_joints`, as JointInput objects."""
    y1 = rng.uniform(-600.0, 600.0, count)
    s2 = rng.choice((-1.0, 1.0), count)
    s3 = rng.choice((-1.0, 1.0), count)
    d2 = rng.uniform(margin, p.l4 - margin, count)
    d3 = rng.uniform(margin, p.l5 - margin, count)
    rows = np.column_stack([y1, y1 + 2.0 * p.l3 - s2 * d2, y1 + p.l3 - s3 * d3])
    return [JointInput(*row) for row in rows.tolist()]


def well_conditioned(p, pose, joints, n_sign, margin=1.0):
    """True when no square root in FK or IK is within ``margin`` of its branch point."""
    y, z, beta = pose.as_tuple()
    y1, y2, y3 = joints.as_tuple()
    z_c3 = p.l1 + n_sign * math.sqrt(max(p.l5 ** 2 - (y - y3) ** 2, 0.0))
    z_f = z + p.l7 * math.sin(beta)
    return (abs(z - p.l1) > margin and abs(y2 - y - p.l3) > margin
            and abs(y3 - y) > margin and abs(z_c3 - p.l1) > margin
            and abs(z_c3 - z_f) > margin)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def serial_sweep(p, half_width=40.0, count=81):
    """FK states along y2 with y1 = 0, y3 = 10 on branch (+1, +1, -1).

    The y2 grid contains y2 = 2 * l3 exactly, where y2 = y + l3.
    """
    from pm2t1r.kinematics import BranchSelector, fk_branch
    states = []
    for y2 in np.linspace(2 * p.l3 - half_width, 2 * p.l3 + half_width, count):
        q_in = JointInput(0.0, float(y2), 10.0)
        sol = fk_branch(p, q_in, BranchSelector(1, 1, -1))
        states.append((sol.pose, q_in, 1))
    return states


def parallel_sweep(p, y=0.0, z=-50.0, lo=0.4, hi=0.76, count=37):
    """IK states along beta on working mode (+1, -1, +1), through the f33 = 0 tilt.

    Returns ``(states, beta_star)``; the crossing tilt is located by Brent's
    method and inserted into the sweep.
    """
    from scipy.optimize import brentq

    from pm2t1r.geometry import PlatformPose
    from pm2t1r.kinematics import BranchSelector, ik_branch
    from pm2t1r.singularity import analytic_jacobians

    branch = BranchSelector(1, -1, 1)

    def state(beta):
        pose = PlatformPose(y, z, beta)
        sol = ik_branch(p, pose, branch)
        n_sign = 1 if sol.z_c3.real >= p.l1 else -1
        return pose, sol.joints, n_sign

    def f33(beta):
        return analytic_jacobians(p, *state(beta)).A[2, 2]

    beta_star = brentq(f33, lo, hi, xtol=1e-15, rtol=1e-15)
    betas = sorted(set(np.linspace(lo, hi, count).tolist()) | {beta_star})
    return [state(b) for b in betas], beta_star


def compress(seq):
    out = []
    for item in seq:
        if not out or out[-1] != item:
            out.append(item)
    return out
