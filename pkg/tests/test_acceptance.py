"""One test per acceptance criterion, each logging a PASS/FAIL line to the summary."""

import math
import time
import timeit

import numpy as np
import pytest

from conftest import (REF_JOINTS, REF_POSE, compress, feasible_joint_batch,
                      feasible_joints, parallel_sweep, serial_sweep, well_conditioned)
from pm2t1r.design import DesignSpec, clearance_lengths, min_l6_search
from pm2t1r.geometry import JointInput, PlatformPose
from pm2t1r.kinematics import BranchSelector, fk_enumerate, ik_enumerate
from pm2t1r.singularity import analytic_jacobians, classify_configuration, fd_jacobians
from pm2t1r.topology import PocSet, reference_mechanism
from pm2t1r.workspace import SampleGrid, sample_workspace, to_csv


def per_call_seconds(func, number=200):
    """Median wall time of one call, from five batches."""
    return float(np.median(timeit.repeat(func, number=number, repeat=5))) / number


def matched(found, expected, tol):
    """True when each expected row has a distinct found row within ``tol``."""
    pool = [np.asarray(f) for f in found]
    for row in expected:
        hit = next((i for i, f in enumerate(pool) if np.max(np.abs(f - row)) <= tol), None)
        if hit is None:
            return False
        pool.pop(hit)
    return not pool


def test_criterion_1_fk_regression(params, acceptance_log):
    q_in = JointInput(*REF_JOINTS)
    sols = fk_enumerate(params, q_in)
    real = [s.values for s in sols if s.is_real]
    expected = [(-84.59, 428.7203, 0.3045), (-84.59, 428.7203, -0.4912),
                (-84.59, -228.7203, 0.4912), (-84.59, -228.7203, -0.3045)]
    imags = [abs(s.imag[2]) for s in sols if not s.is_real]
    runtime = per_call_seconds(lambda: fk_enumerate(params, q_in))
    passed = (len(real) == 4 and matched(real, expected, 1e-3) and len(imags) == 4
              and all(abs(v - 0.3873) <= 1e-3 for v in imags) and runtime < 1e-3)
    acceptance_log(1, "forward kinematics regression", passed,
                   f"{len(real)} real, |Im beta| = {imags[0]:.5f}, {runtime * 1e6:.0f} us/call")
    assert passed


def test_criterion_2_ik_regression(params, acceptance_log):
    pose = PlatformPose(*REF_POSE)
    sols = ik_enumerate(params, pose)
    real = [s.values for s in sols if s.is_real]
    y3_real = sorted({round(float(v[2]), 6) for v in real})
    imags = [abs(s.imag[2]) for s in sols if not s.is_real]
    runtime = per_call_seconds(lambda: ik_enumerate(params, pose))
    passed = (len(real) == 4
              and all(abs(v[0] + 244.59) <= 1e-2 for v in real)
              and matched([[v] for v in y3_real], [[83.0989], [-252.2789]], 1e-2)
              and len(imags) == 4 and all(abs(v - 605.3355) <= 0.1 for v in imags)
              and runtime < 1e-3)
    acceptance_log(2, "inverse kinematics regression", passed,
                   f"y3 real {y3_real}, |Im y3| = {imags[0]:.4f}, {runtime * 1e6:.0f} us/call")
    assert passed


def test_criterion_3_round_trip(params, rng, acceptance_log):
    inputs = feasible_joint_batch(rng, params, 10_500)
    t0 = time.perf_counter()
    checked = rejected = 0
    worst = 0.0
    for q_in in inputs:
        if checked == 10_000:
            break
        real = [(s.pose, s.branch.s2) for s in fk_enumerate(params, q_in) if s.is_real]
        # inputs landing within 1 mm of a square-root branch point are ill-conditioned
        if not all(well_conditioned(params, pose, q_in, n) for pose, n in real):
            rejected += 1
            continue
        x = q_in.as_tuple()
        for pose, _ in real:
            back = np.array([k.values for k in ik_enumerate(params, pose) if k.is_real])
            err = np.abs(back - x).max(axis=1).min() if len(back) else math.inf
            worst = max(worst, err)
        checked += 1
    elapsed = time.perf_counter() - t0
    passed = checked == 10_000 and worst <= 1e-9 and elapsed < 5.0
    acceptance_log(3, "FK/IK round trip", passed,
                   f"{checked} inputs ({rejected} near-branch-point rejected), "
                   f"max error {worst:.2e} mm, {elapsed:.2f} s")
    assert passed


def test_criterion_4_decoupling(params, rng, acceptance_log):
    states = bad = 0
    while states < 1000:
        q_in = feasible_joints(rng, params)
        dy2, dy3 = rng.uniform(-5.0, 5.0, 2)
        base = fk_enumerate(params, q_in)
        moved23 = fk_enumerate(params, JointInput(q_in.y1, q_in.y2 + dy2, q_in.y3 + dy3))
        moved3 = fk_enumerate(params, JointInput(q_in.y1, q_in.y2, q_in.y3 + dy3))
        for s, a, b in zip(base, moved23, moved3):
            if s.values[0] != a.values[0] or s.values[1] != b.values[1]:
                bad += 1
        states += 1
    passed = bad == 0
    acceptance_log(4, "triangular decoupling", passed,
                   f"{states} states x 8 branches, {bad} mismatches")
    assert passed


def test_criterion_5_jacobian_oracle(params, rng, acceptance_log):
    counts = {1: 0, -1: 0}
    worst = worst_zero = 0.0
    while min(counts.values()) < 1000:
        q_in = feasible_joints(rng, params)
        for s in fk_enumerate(params, q_in):
            n = s.branch.s2
            if not s.is_real or counts[n] >= 1000:
                continue
            if not well_conditioned(params, s.pose, q_in, n):
                continue
            Ja = analytic_jacobians(params, s.pose, q_in, n)
            if classify_configuration(Ja).kind != "Regular":
                continue
            Jf = fd_jacobians(params, s.pose, q_in, n, h=1e-5)
            scale = Ja.row_scales()[:, None]
            worst = max(worst, np.max(np.abs(Ja.A - Jf.A) / scale),
                        np.max(np.abs(Ja.B - Jf.B) / scale))
            zeros = [Jf.A[0, 1], Jf.A[0, 2], Jf.A[1, 2], *(Jf.B - np.diag(np.diag(Jf.B))).ravel()]
            worst_zero = max(worst_zero, max(abs(v) for v in zeros))
            counts[n] += 1
    passed = worst <= 1e-6 and worst_zero <= 1e-8
    acceptance_log(5, "Jacobian finite-difference oracle", passed,
                   f"{counts[1]} states n=+1, {counts[-1]} n=-1, max rel error {worst:.2e}, "
                   f"max structural zero {worst_zero:.2e}")
    assert passed


def test_criterion_6_singularity_sweeps(params, acceptance_log):
    serial_kinds, g22 = [], []
    for pose, q_in, n in serial_sweep(params):
        J = analytic_jacobians(params, pose, q_in, n)
        serial_kinds.append(classify_configuration(J).kind)
        g22.append(J.B[1, 1])
    states, beta_star = parallel_sweep(params)
    par_kinds, f33 = [], []
    for pose, q_in, n in states:
        J = analytic_jacobians(params, pose, q_in, n)
        par_kinds.append(classify_configuration(J).kind)
        f33.append(J.A[2, 2])
    serial_ok = (compress(serial_kinds) == ["Regular", "Serial", "Regular"]
                 and np.sign(g22[0]) == -np.sign(g22[-1]) != 0)
    parallel_ok = (compress(par_kinds) == ["Regular", "Parallel", "Regular"]
                   and np.sign(f33[0]) == -np.sign(f33[-1]) != 0)
    passed = serial_ok and parallel_ok
    acceptance_log(6, "singularity sweeps", passed,
                   f"serial {compress(serial_kinds)}, parallel {compress(par_kinds)} "
                   f"at beta* = {beta_star:.6f}")
    assert passed


def _num(x):
    return int(x) if float(x).is_integer() else x


def test_criterion_7_topology(acceptance_log):
    mech = reference_mechanism()
    r = mech.report
    got = (*r.xi, r.F, *r.delta, _num(r.kappa))
    sub_ok = mech.sub_pm == PocSet.from_dirs([(0, 1, 0), (0, 0, 1)], [])
    passed = got == (5, 4, 3, 0, 0, 0) and sub_ok
    acceptance_log(7, "topology and mobility", passed,
                   f"(xi1, xi2, F, d1, d2, kappa) = {got}, sub-PM {mech.sub_pm}")
    assert passed


def test_criterion_8_design(acceptance_log):
    l2, l4 = clearance_lengths(DesignSpec(a=300.0, beta_clearance=0.1))
    t0 = time.perf_counter()
    res = min_l6_search(DesignSpec(), tol=0.05)
    elapsed = time.perf_counter() - t0
    passed = (abs(l2 - 335.13) <= 0.01 and abs(l4 - 670.26) <= 0.01
              and abs(res.l6_min - 255.885) <= 0.5 and abs(res.beta_critical - 0.0854) <= 0.01
              and elapsed < 10.0)
    acceptance_log(8, "link dimensioning", passed,
                   f"l2 = {l2:.4f}, l4 = {l4:.4f}, l6_min = {res.l6_min:.4f} at "
                   f"beta = {res.beta_critical:.5f}, {elapsed * 1e3:.1f} ms")
    assert passed


def test_criterion_9_workspace_determinism(params, acceptance_log):
    grid = SampleGrid(tuple((c - 40.0, c + 40.0, 9) for c in REF_JOINTS))
    branch = BranchSelector(1, 1, -1)
    outputs = {w: to_csv(sample_workspace(params, grid, branch, workers=w)) for w in (1, 2, 4)}
    again = to_csv(sample_workspace(params, grid, branch, workers=1))
    first = outputs[1].encode()
    passed = all(o.encode() == first for o in outputs.values()) and again.encode() == first
    acceptance_log(9, "workspace determinism", passed,
                   f"{len(outputs[1].splitlines()) - 1} rows, workers 1/2/4 byte-identical")
    assert passed
