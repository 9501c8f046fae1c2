"""Link dimensioning for the package-sorting scenario.

The platform must tilt over a range of angles while the angle ``theta``
between the bars EF and FC3 stays away from 0 and pi (a parallel
singularity). With the horizontal rail gap fixed, the only free quantity in
the platform closure is the relative vertical offset ``rho`` of E and C3, so
for every tilt the shortest admissible coupler is a small geometric problem.
The coupler length needed for the whole range is the worst case over tilts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, Infeasible

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# rounded reference sizing, echoed for comparison only
SIZED_REFERENCE = {"l2": 335.0, "l4": 670.0, "l6": 256.0}
REFERENCE_STROKES = {"y1": 0.0, "y2": 593.5, "y3": 611.5}


@dataclass(frozen=True)
class DesignSpec:
    a: float = 300.0
    beta_range: tuple = (-math.pi / 4, math.pi / 4)
    theta_min: float = field(default_factory=lambda: math.asin(0.2))
    beta_clearance: float = 0.1
    l7: float | None = None

    def __post_init__(self):
        lo, hi = self.beta_range
        if not (-math.pi / 2 < lo <= hi < math.pi / 2):
            raise ValueError("beta_range must satisfy -pi/2 < lo <= hi < pi/2")
        if not 0.0 <= self.theta_min < math.pi / 2:
            raise ValueError("theta_min must lie in [0, pi/2)")
        if not self.a > 0:
            raise ValueError("a must be positive")

    @property
    def platform_length(self) -> float:
        """EF length; defaults to 2a*sqrt(2) so that l7 cos(45 deg) = 2a."""
        return self.l7 if self.l7 is not None else 2.0 * self.a * math.sqrt(2.0)


def clearance_lengths(spec: DesignSpec) -> tuple[float, float]:
    """Leg lengths (l2, l4) that keep the clearance angle on both stroke ends."""
    c = spec.beta_clearance
    denom = math.cos(c) - math.sin(c)
    if denom <= 0.0:
        raise DomainError(f"clearance angle {c} rad leaves cos(c) <= sin(c)")
    return spec.a / denom, 2.0 * spec.a / denom


@dataclass(frozen=True)
class PlatformState:
    closure_residual: float
    theta: float


def platform_constraints(a: float, l6: float, l7: float, beta: float,
                         rho: float) -> PlatformState:
    """Closure residual (mm^2) of the E-F-C3 triangle and the bar angle theta.

    ``rho`` is the vertical offset of E above C3.
    """
    if not (l6 > 0 and l7 > 0):
        raise ValueError("l6 and l7 must be positive")
    cb, sb = math.cos(beta), math.sin(beta)
    gap = 2.0 * a - l7 * cb
    rise = rho + l7 * sb
    residual = gap * gap + rise * rise - l6 * l6
    s = (rise * l7 * cb + gap * l7 * sb) / (l6 * l7)
    c = (gap * l7 * cb - rise * l7 * sb) / (l6 * l7)
    return PlatformState(residual, math.atan2(s, c))


def min_l6_at(beta: float, a: float, l7: float, sin_min: float) -> tuple[float, float]:
    """Shortest coupler admissible at tilt ``beta`` and the offset ``rho`` achieving it.

    Writing the coupler vector as ``(h, v)`` with fixed ``h = l7 cos(beta) - 2a``
    and free ``v = rho + l7 sin(beta)``, admissible vectors make an angle
    ``phi`` with EF such that ``sin(phi) >= sin_min``: a cone. Its shortest
    point on the line ``x = h`` is the foot ``v = 0`` or lies on a cone edge.
    Returns ``(inf, nan)`` when the line misses the cone.
    """
    h = l7 * math.cos(beta) - 2.0 * a
    lift = l7 * math.sin(beta)
    if h == 0.0:
        return 0.0, -lift
    best, best_v = math.inf, math.nan
    if -h * math.sin(beta) >= sin_min * abs(h):
        best, best_v = abs(h), 0.0
    phi0 = math.asin(sin_min)
    for edge in (beta + phi0, beta + math.pi - phi0):
        ce = math.cos(edge)
        if ce == 0.0:
            continue
        r = h / ce
        if r > 0.0 and r < best:
            best, best_v = r, r * math.sin(edge)
    return best, best_v - lift


@dataclass(frozen=True)
class L6Result:
    l6_min: float
    beta_critical: float
    rho_critical: float
    l7: float
    sin_theta: float


def _golden_max(f, lo, hi, xtol):
    """Golden-section search for a maximum of unimodal ``f`` on [lo, hi]."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > xtol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def min_l6_search(spec: DesignSpec = DesignSpec(), tol: float = 0.05,
                  n_grid: int = 181, cap: float | None = None) -> L6Result:
    """Smallest coupler length admissible over the whole tilt range.

    Per-tilt minima are evaluated on a uniform grid of ``n_grid`` tilts; the
    worst grid cell is refined by golden-section search until the l6 change
    across the remaining bracket is below ``tol`` (mm).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a, l7 = spec.a, spec.platform_length
    k = math.sin(spec.theta_min)
    cap = 10.0 * a if cap is None else cap

    def f(beta):
        return min_l6_at(beta, a, l7, k)[0]

    lo, hi = spec.beta_range
    if lo == hi:
        betas = np.array([lo])
    else:
        betas = np.linspace(lo, hi, max(int(n_grid), 3))
    vals = np.array([f(b) for b in betas])
    if not np.all(np.isfinite(vals)):
        bad = betas[~np.isfinite(vals)][0]
        raise Infeasible(f"no admissible coupler at beta = {bad:.6g} rad")
    i = int(np.argmax(vals))
    beta_c, l6 = float(betas[i]), float(vals[i])
    if len(betas) > 1:
        step = betas[1] - betas[0]
        slope = max(float(np.max(np.abs(np.diff(vals)))) / step, 1.0)
        left, right = betas[max(i - 1, 0)], betas[min(i + 1, len(betas) - 1)]
        b_ref, l6_ref = _golden_max(f, float(left), float(right), tol / slope)
        if l6_ref > l6:
            beta_c, l6 = b_ref, l6_ref
    if l6 > cap:
        raise Infeasible(f"minimal coupler {l6:.6g} mm exceeds cap {cap:.6g} mm")
    _, rho = min_l6_at(beta_c, a, l7, k)
    state = platform_constraints(a, l6, l7, beta_c, rho)
    return L6Result(l6, beta_c, rho, l7, math.sin(state.theta))


def design_report(spec: DesignSpec = DesignSpec(), tol: float = 0.05) -> dict:
    """Sizing summary with the tabulated values for comparison."""
    l2, l4 = clearance_lengths(spec)
    res = min_l6_search(spec, tol)
    computed = {"l2": l2, "l4": l4, "l6": res.l6_min}
    return {
        "l2": l2,
        "l4": l4,
        "l6_min": res.l6_min,
        "beta_critical": res.beta_critical,
        "l7": res.l7,
        "table3_comparison": {
            key: {"computed": computed[key], "table3": ref,
                  "difference": computed[key] - ref}
            for key, ref in SIZED_REFERENCE.items()
        },
        "reference_strokes": dict(REFERENCE_STROKES),
    }
