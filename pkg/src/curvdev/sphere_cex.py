"""Regular triangles around a spherical circle.

``K(r)`` is the spherical circle of radius ``r`` about the pole and ``T(d)``
the concentric regular triangle with circumradius ``d``.  For ``d`` between
``r`` (inscribed) and ``d_circ`` (circumscribed, inradius equal to ``r``)
each side cuts ``K`` in a chord, and the deviation has the closed form

    f(r, d) = 6 (2 alpha sin r - 2 s + l / 2) - 2 pi sin r

with side ``l``, inradius ``m``, half-chord ``s`` and central half-angle
``alpha`` of the arc of ``K`` cut off by a side.  For ``r`` close to
``pi/2`` the minimum over ``d`` is attained strictly between the two ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discs import Circle, regular_polygon
from .geom_core import Geometry
from .search import golden_section

CLAMP_TOL = 1e-12
BISECT_TOL = 1e-12
REFINE_TOL = 1e-10
DEFAULT_STEPS = 2000
DEFAULT_R = math.pi / 2 - 0.1
DEFAULT_D_MAX = 1.52


class CexError(ValueError):
    """Parameters outside the admissible range."""


class RegimeError(CexError):
    """The triangle's sides miss the circle; it is circumscribed-like."""


@dataclass(frozen=True)
class CexConfig:
    r: float
    d_min: float
    d_max: float
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        _check_r(self.r)
        if not self.d_min >= self.r:
            raise CexError(f"d_min must be >= r ({self.r}), got {self.d_min}")
        if not self.d_max < math.pi / 2:
            raise CexError("d_max must be < pi/2")
        if not self.d_min < self.d_max:
            raise CexError("need d_min < d_max")
        if int(self.steps) != self.steps or self.steps < 2:
            raise CexError("steps must be an integer >= 2")

    @classmethod
    def default(cls, r: float = DEFAULT_R, steps: int = DEFAULT_STEPS) -> "CexConfig":
        return cls(r, r, DEFAULT_D_MAX, steps)


@dataclass(frozen=True)
class TriangleMetrics:
    d: float
    l: float
    m: float
    s: float
    alpha: float
    f: float
    circumscribed: bool = False


def _check_r(r):
    if not (0.0 < r < math.pi / 2):
        raise CexError(f"r must lie in (0, pi/2), got {r}")


def side(d: float) -> float:
    return math.acos(math.cos(d) ** 2 - 0.5 * math.sin(d) ** 2)


def inradius(d: float) -> float:
    return math.acos(math.cos(d) / math.cos(side(d) / 2))


def metrics(r: float, d: float) -> TriangleMetrics:
    """Side, inradius, half-chord, arc half-angle and deviation of ``T(d)``.

    Raises ``RegimeError`` once the inradius exceeds ``r``.
    """
    _check_r(r)
    if not (r <= d < math.pi / 2):
        raise CexError(f"d must lie in [r, pi/2), got {d}")
    l = side(d)
    m = math.acos(math.cos(d) / math.cos(l / 2))
    # right triangle (centre, foot of the inradius, crossing point):
    # cos s = cos r / cos m and cos r = cos m cos s + sin m sin r cos alpha.
    # Tangent forms keep full precision as s -> 0, where acos loses half
    # the digits.
    q = math.sin(r - m) * math.sin(r + m)
    if q < -CLAMP_TOL:
        raise RegimeError(f"side of T({d}) misses K({r}): inradius {m} > r")
    tan_s = math.sqrt(max(q, 0.0)) / math.cos(r)
    s = math.atan(tan_s)
    alpha = math.atan2(tan_s, math.sin(m))
    f = 6.0 * (2.0 * alpha * math.sin(r) - 2.0 * s + l / 2.0) - 2.0 * math.pi * math.sin(r)
    return TriangleMetrics(d, l, m, s, alpha, f)


def circumscribed_value(r: float, d: float) -> float:
    return 3.0 * side(d) - 2.0 * math.pi * math.sin(r)


def f_value(r: float, d: float) -> TriangleMetrics:
    """``metrics`` with the circumscribed fallback past ``d_circ``."""
    try:
        return metrics(r, d)
    except RegimeError:
        l = side(d)
        return TriangleMetrics(d, l, inradius(d), 0.0, 0.0, circumscribed_value(r, d), True)


def d_circumscribed(r: float) -> float:
    """Circumradius whose inradius equals ``r``, by bisection."""
    _check_r(r)
    lo, hi = r, math.pi / 2
    if not (inradius(lo) <= r):
        raise CexError("root of m(d) = r not bracketed")
    # m(d) -> pi/2 as d -> pi/2, so the bracket always closes
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if inradius(mid) > r:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass
class ScanResult:
    config: CexConfig
    rows: list
    d_star: float
    f_star: float
    interior: bool

    @property
    def d(self) -> np.ndarray:
        return np.array([m.d for m in self.rows])

    @property
    def f(self) -> np.ndarray:
        return np.array([m.f for m in self.rows])


def f_scan(cfg: CexConfig) -> ScanResult:
    """Evaluate ``f`` on ``steps + 1`` equally spaced circumradii and refine
    the grid minimum by golden-section search."""
    ds = np.linspace(cfg.d_min, cfg.d_max, cfg.steps + 1)
    rows = [f_value(cfg.r, float(d)) for d in ds]
    fs = np.array([m.f for m in rows])
    j = int(np.argmin(fs))
    lo, hi = ds[max(j - 1, 0)], ds[min(j + 1, len(ds) - 1)]
    d_star, f_star = golden_section(lambda d: f_value(cfg.r, d).f, lo, hi, tol=REFINE_TOL)
    h = ds[1] - ds[0]
    interior = bool(d_star - cfg.d_min > h and cfg.d_max - d_star > h)
    return ScanResult(cfg, rows, float(d_star), float(f_star), interior)


def compare(r: float, steps: int = DEFAULT_STEPS) -> dict:
    """Inscribed, circumscribed and best concentric regular triangles."""
    _check_r(r)
    d_circ = d_circumscribed(r)
    if not d_circ < math.pi / 2:
        raise CexError("circumscribed triangle leaves the open hemisphere")
    f_ins = metrics(r, r).f
    f_circ = f_value(r, d_circ).f
    scan = f_scan(CexConfig(r, r, d_circ, steps))
    out = {
        "r": r,
        "d_inscribed": r,
        "d_circumscribed": d_circ,
        "d_star": scan.d_star,
        "f_inscribed": f_ins,
        "f_circumscribed": f_circ,
        "f_min": scan.f_star,
        "interior": scan.interior,
    }
    values = {"inscribed": f_ins, "circumscribed": f_circ, "minimum": scan.f_star}
    out["ordering"] = sorted(values, key=values.get)
    return out


def triangle(r: float, d: float):
    """``(K(r), T(d))`` as disc and polygon objects, for cross-checks."""
    g = Geometry.SPHERICAL
    return Circle(g, None, r), regular_polygon(g, 3, d)


def monotone_pieces(r: float, steps: int = 200) -> bool:
    """Whether ``s`` and ``alpha`` both decrease on ``[r, d_circ]``."""
    ds = np.linspace(r, d_circumscribed(r), steps + 1)
    ms = [f_value(r, float(d)) for d in ds]
    s = np.array([m.s for m in ms])
    a = np.array([m.alpha for m in ms])
    return bool(np.all(np.diff(s) <= 1e-12) and np.all(np.diff(a) <= 1e-12))


def csv_rows(scan: ScanResult):
    return [(m.d, m.l, m.m, m.s, m.alpha, m.f) for m in scan.rows]

