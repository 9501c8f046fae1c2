"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 domain or infeasibility error.
Numbers are printed with 9 significant digits; complex values as ``a+bi``.
Comma-separated values that start with a minus sign must be attached with
``=``, e.g. ``--pose=-84.59,428.72,0.3045`` or ``--axis=-300:-200:11``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import topology
from .design import DesignSpec, design_report
from .errors import KinematicsError
from .geometry import GeometryParams, JointInput, PlatformPose, load_params, validate_params
from .kinematics import BranchSelector, fk_enumerate, ik_enumerate
from .singularity import (analytic_jacobians, classify_configuration, fd_jacobians,
                          platform_velocity, singularity_margins)
from .workspace import SampleGrid, constant_orientation_slice, sample_workspace, write_csv

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN = 0, 2, 3


class InputError(Exception):
    pass


def g9(x: float) -> str:
    return format(float(x), ".9g")


def c9(re: float, im: float) -> str:
    if im == 0.0:
        return g9(re)
    return f"{g9(re)}{'+' if im > 0 else '-'}{g9(abs(im))}i"


def _branch(text: str) -> BranchSelector:
    try:
        return BranchSelector.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sign(text: str) -> int:
    if text in ("+1", "1", "+"):
        return 1
    if text in ("-1", "-"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be +1 or -1, got {text!r}")


def _triple(text: str) -> tuple:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three numbers, got {text!r}") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three numbers, got {text!r}")
    return vals


def _params(args) -> GeometryParams:
    if args.params:
        try:
            p, warnings = load_params(args.params)
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"cannot read parameters: {exc}") from None
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
    elif args.builtin == "sorting":
        p = GeometryParams.sorting_design()
    else:
        p = GeometryParams.reference()
    for v in validate_params(p):
        print(f"warning: {v.code}: {v.message}", file=sys.stderr)
    return p


def _rounded(obj):
    if isinstance(obj, float):
        return float(g9(obj))
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def _write(path, payload) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _solutions(sols, names, branch_filter):
    rows, payload = [], []
    for s in sols:
        if branch_filter is not None and s.branch != branch_filter:
            continue
        status = "degenerate" if s.degenerate else ("real" if s.is_real else "complex")
        cells = [c9(r, i) for r, i in zip(s.values, s.imag)]
        rows.append(f"{s.branch}  " + "  ".join(f"{n}={c}" for n, c in zip(names, cells))
                    + f"  {status}")
        payload.append({
            "branch": list(s.branch.as_tuple()),
            "values": [float(v) for v in s.values],
            "imag": [float(v) for v in s.imag],
            "is_real": s.is_real,
            "degenerate": s.degenerate,
        })
    return rows, payload


def cmd_fk(args) -> int:
    p = _params(args)
    q_in = JointInput(args.y1, args.y2, args.y3)
    rows, payload = _solutions(fk_enumerate(p, q_in), ("y", "z", "beta"), args.branch)
    print("m,n,q")
    print("\n".join(rows))
    _write(args.output, {"joints": list(q_in.as_tuple()), "solutions": payload})
    return EXIT_OK


def cmd_ik(args) -> int:
    p = _params(args)
    pose = PlatformPose(args.y, args.z, args.beta)
    rows, payload = _solutions(ik_enumerate(p, pose), ("y1", "y2", "y3"), args.branch)
    print("u,v,w")
    print("\n".join(rows))
    _write(args.output, {"pose": list(pose.as_tuple()), "solutions": payload})
    return EXIT_OK


def _state(args):
    pose = PlatformPose(*args.pose)
    q_in = JointInput(*args.joints)
    return pose, q_in


def _matrix_lines(name, m):
    return [f"{name}:"] + ["  " + "  ".join(g9(v) for v in row) for row in m]


def cmd_jacobian(args) -> int:
    p = _params(args)
    pose, q_in = _state(args)
    if args.fd:
        J = fd_jacobians(p, pose, q_in, args.n, args.h)
    else:
        J = analytic_jacobians(p, pose, q_in, args.n)
    print("\n".join(_matrix_lines("A", J.A) + _matrix_lines("B", J.B)))
    print(f"det(A) = {g9(J.det_parallel())}")
    print(f"det(B) = {g9(J.det_serial())}")
    _write(args.output, {"A": J.A.tolist(), "B": J.B.tolist(),
                         "det_A": J.det_parallel(), "det_B": J.det_serial()})
    return EXIT_OK


def cmd_singularity(args) -> int:
    p = _params(args)
    pose, q_in = _state(args)
    J = analytic_jacobians(p, pose, q_in, args.n)
    cls = classify_configuration(J, args.eps)
    ser, par = singularity_margins(J)
    leg1 = 2.0 * p.l2 - abs(pose.z - p.l1)
    print(f"kind = {cls.kind}")
    print(f"serial_cases = {','.join(sorted(cls.serial_cases)) or '-'}")
    print(f"parallel_cases = {','.join(sorted(cls.parallel_cases)) or '-'}")
    print(f"margin_serial = {g9(ser)}")
    print(f"margin_parallel = {g9(par)}")
    print(f"leg1_margin = {g9(leg1)}")
    payload = {"kind": cls.kind, "serial_cases": sorted(cls.serial_cases),
               "parallel_cases": sorted(cls.parallel_cases),
               "margin_serial": ser, "margin_parallel": par, "leg1_margin": leg1}
    if args.rates is not None:
        t = platform_velocity(J, args.rates, args.eps)
        print("velocity = " + "  ".join(g9(v) for v in t))
        payload["velocity"] = t.tolist()
    _write(args.output, payload)
    return EXIT_OK


def cmd_workspace(args) -> int:
    p = _params(args)
    try:
        grid = SampleGrid.parse(args.axis)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.mode == "joints":
        if len(grid.axes) != 3:
            raise InputError("joint mode needs three --axis specs (y1, y2, y3)")
        records = sample_workspace(p, grid, args.branch, workers=args.workers)
    else:
        if len(grid.axes) != 2:
            raise InputError("slice mode needs two --axis specs (y, z)")
        records = constant_orientation_slice(p, grid, args.beta, args.branch,
                                             workers=args.workers)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_csv(records, fh)
        print(f"records = {len(records)} of {len(grid)} grid points")
    else:
        write_csv(records, sys.stdout)
    return EXIT_OK


def cmd_topology(args) -> int:
    if args.builtin == "paper":
        topo = topology.reference_mechanism()
        report, formula = topo.report, topo.formula
        lines = [
            f"limb A          = {topo.pocs[0][0]}",
            f"limb B          = {topo.pocs[0][1]}",
            f"sub-PM (A ∩ B)  = {topo.sub_pm}",
            f"HC-I            = {topo.hc1}",
            f"HC-II           = {topo.hc2}",
            f"platform        = {topo.platform}",
        ]
    else:
        if not args.loop or len(args.limb) != len(args.loop) + 1:
            raise InputError("give --builtin paper, or v --loop and v+1 --limb specs")
        try:
            loops = [topology.parse_loop(t) for t in args.loop]
            limbs = [topology.chain_poc(topology.parse_loop(t)) for t in args.limb]
        except ValueError as exc:
            raise InputError(str(exc)) from None
        report = topology.chain_mobility(loops, limbs)
        platform = limbs[0]
        pairs = []
        for nxt in limbs[1:]:
            pairs.append((platform, nxt))
            platform = topology.poc_intersect(platform, nxt)
        formula = topology.topological_formula(report, platform, pairs)
        lines = [f"limb {i + 1}          = {m}" for i, m in enumerate(limbs)]
        lines.append(f"platform        = {platform}")
    kappa = topology._fmt_num(report.kappa)
    lines += [
        f"xi    = ({', '.join(map(str, report.xi))})",
        f"F     = {report.F}",
        f"delta = ({', '.join(map(str, report.delta))})",
        f"kappa = {kappa}",
        f"formula: {formula}",
    ]
    print("\n".join(lines))
    _write(args.output, {"xi": list(report.xi), "F": report.F, "delta": list(report.delta),
                         "kappa": report.kappa, "formula": formula})
    return EXIT_OK


def cmd_design(args) -> int:
    try:
        spec = DesignSpec(a=args.a, beta_range=(args.beta_min, args.beta_max),
                          theta_min=math.asin(args.sin_theta_min),
                          beta_clearance=args.clearance, l7=args.l7)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = design_report(spec, args.tol)
    print(json.dumps(_rounded(report), indent=2, sort_keys=True))
    _write(args.output, report)
    return EXIT_OK


def _add_params(sp) -> None:
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--params", metavar="FILE",
                   help="JSON file with keys a, l1..l8, l0 (mm)")
    g.add_argument("--builtin", choices=("paper", "sorting"), default="paper",
                   help="built-in dimensions: paper (verification example) or sorting (sized robot); default paper")


def _add_state(sp) -> None:
    sp.add_argument("--pose", type=_triple, required=True, metavar="Y,Z,BETA",
                    help="platform pose in mm, mm, rad")
    sp.add_argument("--joints", type=_triple, required=True, metavar="Y1,Y2,Y3",
                    help="actuator positions in mm")
    sp.add_argument("--n", type=_sign, default=1, help="coupler branch sign (default +1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pm2t1r", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fk", help="forward kinematics, all assembly modes")
    _add_params(sp)
    for name in ("y1", "y2", "y3"):
        sp.add_argument(f"--{name}", type=float, required=True)
    sp.add_argument("--branch", type=_branch, help="only this m,n,q, e.g. +1,+1,-1")
    sp.add_argument("-o", "--output", help="write JSON results here")
    sp.set_defaults(func=cmd_fk)

    sp = sub.add_parser("ik", help="inverse kinematics, all working modes")
    _add_params(sp)
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--z", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True, help="tilt in rad")
    sp.add_argument("--branch", type=_branch, help="only this u,v,w")
    sp.add_argument("-o", "--output", help="write JSON results here")
    sp.set_defaults(func=cmd_ik)

    sp = sub.add_parser("jacobian", help="parallel and serial Jacobians")
    _add_params(sp)
    _add_state(sp)
    sp.add_argument("--fd", action="store_true", help="central differences instead")
    sp.add_argument("--h", type=float, default=1e-5, help="finite-difference step")
    sp.add_argument("-o", "--output", help="write JSON results here")
    sp.set_defaults(func=cmd_jacobian)

    sp = sub.add_parser("singularity", help="classify a configuration")
    _add_params(sp)
    _add_state(sp)
    sp.add_argument("--eps", type=float, default=1e-9, help="relative zero tolerance")
    sp.add_argument("--rates", type=_triple, metavar="V1,V2,V3",
                    help="actuator rates; prints the platform velocity")
    sp.add_argument("-o", "--output", help="write JSON results here")
    sp.set_defaults(func=cmd_singularity)

    sp = sub.add_parser(
        "workspace", help="grid-sampled workspace with singularity margins",
        description="joints mode: three --axis specs for y1, y2, y3 (FK branch m,n,q). "
                    "slice mode: two --axis specs for y, z at fixed --beta (IK branch u,v,w). "
                    "Axis spec is min:max:count.")
    _add_params(sp)
    sp.add_argument("--mode", choices=("joints", "slice"), default="joints")
    sp.add_argument("--axis", action="append", required=True, metavar="MIN:MAX:COUNT")
    sp.add_argument("--branch", type=_branch, required=True)
    sp.add_argument("--beta", type=float, default=0.0, help="tilt for slice mode, rad")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("-o", "--output", help="write CSV here instead of stdout")
    sp.set_defaults(func=cmd_workspace)

    sp = sub.add_parser(
        "topology", help="POC-based mobility analysis",
        description="Either --builtin paper, or v --loop specs plus v+1 --limb specs.\n\n"
                    + topology.__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--builtin", choices=("paper",))
    sp.add_argument("--loop", action="append", default=[], help="loop in joint notation")
    sp.add_argument("--limb", action="append", default=[],
                    help="limb chain in joint notation, all axes resolved")
    sp.add_argument("-o", "--output", help="write JSON results here")
    sp.set_defaults(func=cmd_topology)

    sp = sub.add_parser("design", help="leg and coupler dimensioning")
    sp.add_argument("--a", type=float, default=300.0, help="half rail spacing, mm")
    sp.add_argument("--clearance", type=float, default=0.1, help="clearance angle, rad")
    sp.add_argument("--sin-theta-min", type=float, default=0.2,
                    help="lower bound on sin of the EF-FC3 angle")
    sp.add_argument("--beta-min", type=float, default=-math.pi / 4)
    sp.add_argument("--beta-max", type=float, default=math.pi / 4)
    sp.add_argument("--l7", type=float, help="platform length (default 2a*sqrt(2))")
    sp.add_argument("--tol", type=float, default=0.05, help="l6 tolerance, mm")
    sp.add_argument("-o", "--output", help="write JSON report here")
    sp.set_defaults(func=cmd_design)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KinematicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
