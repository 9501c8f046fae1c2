"""Position-and-orientation characteristic (POC) sets and mobility counts.

A POC set is modelled as a pair of linear subspaces of R^3: the span of the
available translation directions and the span of the available rotation
axes. Union is the subspace sum, intersection the subspace intersection.

Loop notation
-------------
A chain or loop is written as joints separated by axis relations::

    P11*[y] || R12 || R13 || R14 ^ R23[x] || R22 ^ P21*[y]

joint     KIND LABEL ["*"] ["[" AXIS "]"]
KIND      ``P`` prismatic, ``R`` revolute, ``Pa`` or ``π`` parallelogram
LABEL     optional digits, e.g. ``11``
``*``     marks the joint as actuated
AXIS      ``x``, ``y``, ``z`` (optionally signed) or ``a,b,c``
``||``    next axis parallel to the previous one (inherited if not given)
``^``     next axis perpendicular to the previous one (must be given)
``-``     no stated relation (axis must be given)

The symbols ``∥``, ``⊥`` and ``−`` are accepted as aliases of ``||``, ``^``
and ``-``. Leading and trailing ``-`` are ignored. For a parallelogram the axis is its
circular-translation direction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

RANK_TOL = 1e-10
_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


def _basis(vectors) -> np.ndarray:
    """Orthonormal basis (rows) of the span of ``vectors``."""
    m = np.asarray(vectors, dtype=float).reshape(-1, 3)
    if m.shape[0] == 0:
        return np.zeros((0, 3))
    _, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > RANK_TOL * max(1.0, s[0])))
    return vt[:rank]


def _complement(basis: np.ndarray) -> np.ndarray:
    if basis.shape[0] == 0:
        return np.eye(3)
    _, s, vt = np.linalg.svd(basis)
    return vt[basis.shape[0]:]


def _intersect(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # (U ∩ V)^⊥ = U^⊥ + V^⊥
    return _complement(_basis(np.vstack([_complement(u), _complement(v)])))


def _projector(b: np.ndarray) -> np.ndarray:
    return b.T @ b


def _axis_name(vec) -> str:
    for name, e in _AXES.items():
        if abs(abs(float(np.dot(vec, e))) - 1.0) < 1e-9:
            return name
    return "(" + ",".join(f"{c:.3g}" for c in vec) + ")"


def _describe(b: np.ndarray, letter: str) -> str:
    k = b.shape[0]
    if k == 0 or k == 3:
        return f"{letter}^{k}"
    if k == 1:
        return f"{letter}^1(∥{_axis_name(b[0])})"
    normal = _complement(b)[0]
    planes = {"x": "yoz", "y": "xoz", "z": "xoy"}
    name = _axis_name(normal)
    if name in planes:
        return f"{letter}^2(∥◇({planes[name]}))"
    return f"{letter}^2(⊥{name})"


@dataclass(frozen=True, eq=False)
class PocSet:
    """Translation and rotation subspaces, each stored as an orthonormal basis."""

    t: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    r: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    @classmethod
    def from_dirs(cls, t=(), r=()) -> PocSet:
        """Build from direction lists; ``"full"`` means all of R^3."""
        t = np.eye(3) if isinstance(t, str) and t == "full" else t
        r = np.eye(3) if isinstance(r, str) and r == "full" else r
        return cls(_basis(t), _basis(r))

    @classmethod
    def empty(cls) -> PocSet:
        return cls()

    @property
    def t_dim(self) -> int:
        return self.t.shape[0]

    @property
    def r_dim(self) -> int:
        return self.r.shape[0]

    @property
    def dim(self) -> int:
        return self.t_dim + self.r_dim

    def motion_type(self) -> str:
        return f"{self.t_dim}T{self.r_dim}R"

    def __eq__(self, other):
        if not isinstance(other, PocSet):
            return NotImplemented
        return (self.t_dim == other.t_dim and self.r_dim == other.r_dim
                and np.allclose(_projector(self.t), _projector(other.t), atol=1e-9)
                and np.allclose(_projector(self.r), _projector(other.r), atol=1e-9))

    def __hash__(self):
        return hash((self.t_dim, self.r_dim))

    def rotated(self, rot) -> PocSet:
        rot = np.asarray(rot, dtype=float)
        return PocSet(_basis(self.t @ rot.T), _basis(self.r @ rot.T))

    def __str__(self):
        return f"[{_describe(self.t, 't')}; {_describe(self.r, 'r')}]"

    __repr__ = __str__


def poc_union(a: PocSet, b: PocSet) -> PocSet:
    return PocSet(_basis(np.vstack([a.t, b.t])), _basis(np.vstack([a.r, b.r])))


def poc_intersect(a: PocSet, b: PocSet) -> PocSet:
    return PocSet(_intersect(a.t, b.t), _intersect(a.r, b.r))


def loop_equation_count(sub_poc: PocSet, next_limb_poc: PocSet) -> int:
    """Number of independent displacement equations of a loop."""
    return poc_union(sub_poc, next_limb_poc).dim


# --- loop notation -------------------------------------------------------

@dataclass(frozen=True)
class Joint:
    kind: str  # "P", "R" or "Pa"
    label: str
    actuated: bool
    axis: tuple | None

    @property
    def name(self) -> str:
        return f"{self.kind}{self.label}"


@dataclass(frozen=True)
class LoopSpec:
    joints: tuple
    relations: tuple  # relation before each joint after the first

    @property
    def freedoms(self) -> int:
        return len(self.joints)

    @property
    def actuated(self) -> int:
        return sum(j.actuated for j in self.joints)


_JOINT_RE = re.compile(r"^(Pa|π|P|R)(\d*)(\*?)(?:\[([^\]]*)\])?$")


def _tokenize(body: str):
    """Split into joint tokens and separators, ignoring text inside brackets."""
    names, seps, cur, depth, i = [], [], "", 0, 0
    while i < len(body):
        ch = body[i]
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if depth == 0 and (body.startswith("||", i) or ch in "^-"):
            sep = "||" if body.startswith("||", i) else ch
            names.append(cur.strip())
            seps.append(sep)
            cur = ""
            i += len(sep)
            continue
        cur += ch
        i += 1
    names.append(cur.strip())
    return names, seps


def _parse_axis(text: str) -> tuple:
    text = text.strip()
    sign = 1.0
    if text[:1] in "+-" and text[1:] in _AXES:
        sign = -1.0 if text[0] == "-" else 1.0
        text = text[1:]
    if text in _AXES:
        vec = np.array(_AXES[text]) * sign
    else:
        try:
            vec = np.array([float(c) for c in text.split(",")])
        except ValueError:
            raise ValueError(f"bad axis {text!r}") from None
        if vec.shape != (3,) or np.linalg.norm(vec) == 0:
            raise ValueError(f"bad axis {text!r}")
    return tuple(float(c) for c in vec / np.linalg.norm(vec))


def parse_loop(text: str) -> LoopSpec:
    """Parse the compact joint notation described in the module docstring."""
    body = text.replace("∥", "||").replace("⊥", "^").replace("−", "-").strip()
    while body.startswith("-"):
        body = body[1:].strip()
    while body.endswith("-"):
        body = body[:-1].strip()
    if not body:
        raise ValueError("empty loop notation")
    names, seps = _tokenize(body)
    joints = []
    for i, raw in enumerate(names):
        m = _JOINT_RE.match(raw.strip())
        if not m:
            raise ValueError(f"cannot parse joint {raw!r}")
        kind, label, star, axis_txt = m.groups()
        kind = "Pa" if kind == "π" else kind
        axis = _parse_axis(axis_txt) if axis_txt else None
        if i > 0:
            rel = seps[i - 1]
            prev = joints[-1].axis
            if rel == "||":
                if axis is None:
                    axis = prev
                elif prev is not None and np.linalg.norm(np.cross(axis, prev)) > 1e-9:
                    raise ValueError(f"{kind}{label} is marked parallel but its axis is not")
            elif rel == "^" and axis is not None and prev is not None:
                if abs(np.dot(axis, prev)) > 1e-9:
                    raise ValueError(f"{kind}{label} is marked perpendicular but its axis is not")
        joints.append(Joint(kind, label, bool(star), axis))
    return LoopSpec(tuple(joints), tuple(seps))


def chain_poc(chain: LoopSpec) -> PocSet:
    """POC set at the end of a serial chain, with the base point on the last R axis.

    P and π joints add their translation direction. A run of k consecutive
    revolute joints with parallel axes adds one rotation about that axis and,
    for k >= 2, the plane of translations normal to it.
    """
    if any(j.axis is None for j in chain.joints):
        raise ValueError("every joint axis must be resolved to derive a POC set")
    t, r = [], []
    run = []

    def flush():
        if run:
            ax = np.array(run[0])
            r.append(ax)
            if len(run) >= 2:
                t.extend(_complement(_basis(ax)))
            run.clear()

    for j in chain.joints:
        if j.kind == "R":
            if run and np.linalg.norm(np.cross(run[0], j.axis)) > 1e-9:
                flush()
            run.append(j.axis)
        else:
            flush()
            t.append(np.array(j.axis))
    flush()
    return PocSet(_basis(t), _basis(r))


# --- mobility ------------------------------------------------------------

@dataclass(frozen=True)
class MobilityReport:
    F: int
    xi: tuple
    delta: tuple
    kappa: float
    freedoms: tuple
    actuated: tuple


def mobility_analysis(loops, pocs) -> MobilityReport:
    """DOF, per-loop constraint degrees and coupling degree.

    ``pocs[j]`` is the pair ``(sub-mechanism POC, next limb POC)`` whose
    union dimension gives loop j's equation count. The coupling degree is
    evaluated for the given loop decomposition only.
    """
    loops = list(loops)
    pocs = list(pocs)
    if not loops:
        raise ValueError("at least one loop is required")
    if len(pocs) != len(loops):
        raise ValueError("need one POC pair per loop")
    xi = tuple(loop_equation_count(a, b) for a, b in pocs)
    freedoms = tuple(lp.freedoms for lp in loops)
    actuated = tuple(lp.actuated for lp in loops)
    F = sum(freedoms) - sum(xi)
    delta = tuple(f - i - x for f, i, x in zip(freedoms, actuated, xi))
    kappa = 0.5 * sum(abs(d) for d in delta)
    return MobilityReport(F, xi, delta, kappa, freedoms, actuated)


def chain_mobility(loops, limbs) -> MobilityReport:
    """Mobility from v loops and v + 1 limb POC sets.

    Loop j closes the sub-mechanism built from limbs 0..j with limb j + 1,
    so its POC pair is ``(limb_0 ∩ ... ∩ limb_j, limb_{j+1})``.
    """
    loops, limbs = list(loops), list(limbs)
    if len(limbs) != len(loops) + 1:
        raise ValueError("need exactly one more limb than loops")
    pairs, sub = [], limbs[0]
    for nxt in limbs[1:]:
        pairs.append((sub, nxt))
        sub = poc_intersect(sub, nxt)
    return mobility_analysis(loops, pairs)


def _fmt_num(x) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


def topological_formula(report: MobilityReport, platform: PocSet, pocs) -> str:
    """Compact report string, e.g. ``2T1R-PM^0[3, 2(7, 5)] = 2T1R-SKC_1^0(0; 5) + ...``.

    Each loop is labelled with the motion type of the limb that closes it
    and annotated with ``(delta; xi)``. Informational only.
    """
    k = _fmt_num(report.kappa)
    freedoms = ", ".join(str(f) for f in report.freedoms)
    head = f"{platform.motion_type()}-PM^{k}[{report.F}, {len(report.xi)}({freedoms})]"
    terms = []
    for j, ((_, limb), d, x) in enumerate(zip(pocs, report.delta, report.xi), start=1):
        terms.append(f"{limb.motion_type()}-SKC_{j}^{_fmt_num(abs(d) / 2)}({d}; {x})")
    return head + " = " + " + ".join(terms)


# --- the mechanism of this package -----------------------------------------

LIMB_A = "P11*[y] || R12 || R13 || R14"
LIMB_B = "P21*[y] ^ R22[x] || R23"
CHAIN_R24 = "R24[y]"
LIMB_HC2 = "P31*[y] - Pa[z] - R33[y] || R34"
LOOP_1 = "-P11*[y] || R12 || R13 || R14 ^ R23[x] || R22 ^ P21*[y]-"
LOOP_2 = "-P31*[y] - Pa[z] - R33[y] || R34 - R24[y]-"


@dataclass
class MechanismTopology:
    loops: list
    pocs: list
    sub_pm: PocSet
    hc1: PocSet
    hc2: PocSet
    platform: PocSet
    report: MobilityReport
    formula: str = ""


def reference_mechanism() -> MechanismTopology:
    """Topology of the two-hybrid-chain 2T1R mechanism.

    Axes: y along the rails, x across them, z normal to the base.
    """
    limb_a = chain_poc(parse_loop(LIMB_A))
    limb_b = chain_poc(parse_loop(LIMB_B))
    sub_pm = poc_intersect(limb_a, limb_b)
    hc1 = poc_union(sub_pm, chain_poc(parse_loop(CHAIN_R24)))
    hc2 = chain_poc(parse_loop(LIMB_HC2))
    platform = poc_intersect(hc1, hc2)
    loops = [parse_loop(LOOP_1), parse_loop(LOOP_2)]
    pocs = [(limb_a, limb_b), (hc1, hc2)]
    report = mobility_analysis(loops, pocs)
    out = MechanismTopology(loops, pocs, sub_pm, hc1, hc2, platform, report)
    out.formula = topological_formula(report, platform, pocs)
    return out
