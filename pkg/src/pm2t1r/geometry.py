"""Dimensional model of the 2T1R mechanism.

All lengths are in millimetres and all angles in radians. The x-coordinate
of the platform base point E is structurally fixed at ``a`` and is never
stored.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import NamedTuple

KINEMATIC_KEYS = ("a", "l1", "l2", "l3", "l4", "l5", "l6", "l7")
OPTIONAL_KEYS = ("l0", "l8")


@dataclass(frozen=True)
class GeometryParams:
    """Link lengths and half rail spacing.

    ``l0`` (parallelogram offset) and ``l8`` (parallelogram short side) are
    carried for completeness; no kinematic operation reads them.
    """

    a: float
    l1: float
    l2: float
    l3: float
    l4: float
    l5: float
    l6: float
    l7: float
    l0: float = 0.0
    l8: float = 0.0

    @classmethod
    def reference(cls) -> GeometryParams:
        """Dimensions used for the numerical FK/IK verification."""
        return cls(a=300.0, l1=100.0, l2=200.0, l3=160.0, l4=400.0,
                   l5=320.0, l6=240.0, l7=500.0)

    @classmethod
    def sorting_design(cls) -> GeometryParams:
        """Dimensions of the sized sorting robot.

        The reference sizing sets l1 = ``l0 + l6``; that relation is applied here as a
        design convention only, l1 stays an independent riser height.
        """
        a, l0, l4, l6 = 300.0, 10.0, 670.0, 256.0
        return cls(a=a, l1=l0 + l6, l2=335.0, l3=160.0, l4=l4, l5=l4,
                   l6=l6, l7=2.0 * a * math.sqrt(2.0), l0=l0, l8=100.0)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> tuple[GeometryParams, list[str]]:
        """Build from a flat mapping; returns ``(params, warnings)``.

        Raises ``KeyError`` for a missing kinematic length and ``ValueError``
        for unknown keys or non-numeric values.
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown parameter keys: {', '.join(unknown)}")
        missing = [k for k in KINEMATIC_KEYS if k not in data]
        if missing:
            raise KeyError(f"missing parameter keys: {', '.join(missing)}")
        warnings = []
        values = {}
        for key in KINEMATIC_KEYS + OPTIONAL_KEYS:
            if key not in data:
                warnings.append(f"{key} not given, defaulting to 0")
                values[key] = 0.0
                continue
            raw = data[key]
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ValueError(f"parameter {key} must be a number, got {raw!r}")
            values[key] = float(raw)
        return cls(**values), warnings


def load_params(path: str | Path) -> tuple[GeometryParams, list[str]]:
    """Read a JSON parameter file (flat object of lengths in mm)."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("parameter file must hold a JSON object")
    return GeometryParams.from_dict(data)


@dataclass(frozen=True)
class JointInput:
    """Actuated prismatic displacements along y, mm."""

    y1: float
    y2: float
    y3: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.y1, self.y2, self.y3)):
            raise ValueError("joint inputs must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.y1, self.y2, self.y3)


def wrap_angle(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped == -math.pi:
        return math.pi
    return wrapped


@dataclass(frozen=True)
class PlatformPose:
    """Position (y, z) of the base point E and tilt ``beta`` about y."""

    y: float
    z: float
    beta: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.y, self.z, self.beta)):
            raise ValueError("pose components must be finite")
        object.__setattr__(self, "beta", wrap_angle(self.beta))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.y, self.z, self.beta)


class Violation(NamedTuple):
    code: str
    message: str


def validate_params(p: GeometryParams) -> list[Violation]:
    """Return every rule ``p`` breaks; an empty list means valid."""
    report = []
    for key in KINEMATIC_KEYS:
        value = getattr(p, key)
        if not value > 0:
            report.append(Violation("non-positive length", f"{key} = {value} must be > 0"))
    for key in OPTIONAL_KEYS:
        value = getattr(p, key)
        if value < 0:
            report.append(Violation("non-positive length", f"{key} = {value} must be >= 0"))
    if p.l4 < p.l1:
        report.append(Violation(
            "leg cannot reach base plane",
            f"l4 = {p.l4} < l1 = {p.l1}: no real platform height z = 0"))
    if p.l6 + p.l7 < 2.0 * p.a:
        report.append(Violation(
            "coupler cannot span rails",
            f"l6 + l7 = {p.l6 + p.l7} < 2a = {2.0 * p.a}"))
    if p.l6 < abs(2.0 * p.a - p.l7):
        report.append(Violation(
            "coupler cannot reach at zero tilt",
            f"l6 = {p.l6} < |2a - l7| = {abs(2.0 * p.a - p.l7)}"))
    return report
