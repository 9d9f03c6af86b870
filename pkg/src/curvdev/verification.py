"""Numerical checks of the local chord-arc expansions at a boundary point.

Every probe works on a disc moved so that the chosen boundary point ``o`` is
the model origin, the tangent there is the positive x-axis and the disc lies
in the upper half plane.  Near ``o`` the boundary is then a graph
``y = f(x)`` with ``f(x) ~ kappa x^2 / 2``, where ``kappa`` is the geodesic
curvature at ``o`` (Christoffel symbols vanish at the origin).

Three families of chords are measured:

* arc length ``s(x)`` from ``o`` to the boundary point with abscissa ``x``;
  ``(s - x) / x^3`` tends to ``(kappa^2 + 2) / 6`` (``kappa^2 / 6`` in the
  Euclidean plane);
* chords cut by the line ``y = delta``; the arc minus chord defect behaves
  like ``C delta^(3/2)`` with ``C = (2 sqrt 2 / 3) sqrt(kappa)``, since each
  side contributes ``kappa^2 x^3 / 6`` with ``x ~ sqrt(2 delta / kappa)``;
* chords through ``o`` at angle ``theta``; the second crossing has
  ``x(theta) ~ 2 theta / kappa`` and the defect behaves like
  ``theta^3 / (3 kappa)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .discs import Circle, ConvexDisc, KleinSmooth, MovedDisc, _pushforward
from .geom_core import Geometry, curve_length, origin, raw_distance, rotation, translation_to

QUAD_TOL = 1e-13
MIN_SAMPLES = 6
# local-graph probes never need more than this much of the boundary
_SEARCH_SPAN = 0.5

ARC_RANGE = (1e-3, 5e-2)
DELTA_RANGE = (1e-5, 1e-2)
THETA_RANGE = (1e-4, 5e-2)


class VerificationError(ValueError):
    """Probe parameters outside the region where the boundary is a local graph."""


@dataclass(frozen=True)
class ChordArcProbe:
    param: float      # x, delta or theta
    s: float          # boundary arc length
    s_l: float        # chord length
    x_plus: float     # abscissa of the (right) crossing
    x_minus: float = 0.0

    @property
    def defect(self) -> float:
        return self.s - self.s_l


@dataclass
class FitReport:
    kind: str
    exponent: float
    coefficient: float
    expected: float
    grid: tuple
    residual: float
    kappa: float
    probes: list = field(repr=False, default_factory=list)
    running: list = field(repr=False, default_factory=list)

    @property
    def relative_error(self) -> float:
        return abs(self.coefficient - self.expected) / abs(self.expected)


@dataclass
class Normalized:
    """A disc in standard position together with the data used to probe it."""

    disc: ConvexDisc
    isometry: object
    t0: float
    kappa: float

    @property
    def geometry(self) -> Geometry:
        return self.disc.geometry


def normalize_to_origin(k: ConvexDisc, t: float):
    """Move ``k`` so its boundary point at parameter ``t`` is the origin with
    tangent along the positive x-axis; the disc then lies above the axis.

    Returns ``(disc, isometry)``.
    """
    base = k.base if isinstance(k, MovedDisc) else k
    if not isinstance(base, (Circle, KleinSmooth)):
        raise VerificationError(f"cannot normalize a {type(base).__name__}")
    g = k.geometry
    if g is Geometry.SPHERICAL:
        raise VerificationError("local chord probes are implemented for curvature <= 0")
    x = k.boundary_point(t)
    to_origin = translation_to(g, x).inverse()
    _, dy = _pushforward(g, to_origin, x, k.boundary_derivative(t))
    iso = rotation(g, -math.atan2(dy[1], dy[0])) @ to_origin
    return MovedDisc(k, iso), iso


def prepare(k: ConvexDisc, t: float = 0.0) -> Normalized:
    disc, iso = normalize_to_origin(k, t)
    kappa = disc.geodesic_curvature(origin(disc.geometry))
    return Normalized(disc, iso, t, kappa)


def _grid(values, bounds, name) -> tuple:
    g = sorted({float(v) for v in values}, reverse=True)
    if len(g) < MIN_SAMPLES:
        raise VerificationError(f"{name} grid needs at least {MIN_SAMPLES} distinct values")
    lo, hi = bounds
    if g[-1] < lo * (1 - 1e-12) or g[0] > hi * (1 + 1e-12):
        raise VerificationError(f"{name} grid must lie in [{lo:g}, {hi:g}]")
    return tuple(g)


def default_grid(bounds, count: int = 12) -> np.ndarray:
    lo, hi = bounds
    return np.geomspace(hi, lo, count)


def _arc(nd: Normalized, t0: float, t1: float) -> float:
    d = nd.disc
    return curve_length(nd.geometry, d.boundary_point, t0, t1, tol=QUAD_TOL,
                        derivative=d.boundary_derivative)


def _param_at_abscissa(nd: Normalized, x: float) -> float:
    """Boundary parameter right of ``o`` whose point has abscissa ``x``."""
    d = nd.disc
    span = _SEARCH_SPAN * d.period
    ts = nd.t0 + span * np.linspace(0.0, 1.0, 513)
    xs = np.array([d.boundary_point(t)[0] for t in ts])
    rising = np.maximum.accumulate(xs)
    hit = np.nonzero(rising >= x)[0]
    if len(hit) == 0 or hit[0] == 0:
        raise VerificationError(f"abscissa {x:g} is outside the local graph of the boundary")
    j = hit[0]
    return optimize.brentq(lambda t: d.boundary_point(t)[0] - x, ts[j - 1], ts[j], xtol=1e-15)


def _unwrap(t: float, ref: float, period: float, forward: bool) -> float:
    """Representative of ``t`` just after (or before) ``ref``."""
    if forward:
        return ref + (t - ref) % period
    return ref - (ref - t) % period


def _fit(kind, params, values, order, richardson, expected, kappa, probes) -> FitReport:
    """Exponent from the two smallest parameters; coefficient of
    ``value ~ C param^order`` by one Richardson step assuming a correction
    of relative size ``param^richardson``."""
    p = np.asarray(params)
    v = np.asarray(values)
    if np.any(v <= 0):
        raise VerificationError(f"{kind}: non-positive defect, grid too fine for the quadrature")
    exponent = math.log(v[-1] / v[-2]) / math.log(p[-1] / p[-2])
    ratios = v / p ** order
    a, b = p[-1] ** richardson, p[-2] ** richardson
    coef = (ratios[-1] * b - ratios[-2] * a) / (b - a)
    residual = float(np.sqrt(np.mean((np.log(ratios) - math.log(coef)) ** 2)))
    return FitReport(kind, exponent, float(coef), expected, tuple(float(x) for x in p),
                     residual, kappa, probes, [float(r) for r in ratios])


def arc_coefficient_fit(k, grid=None, t: float = 0.0) -> FitReport:
    """Fit ``(s(x) - x) / x^3`` on a decreasing grid of abscissae."""
    nd = k if isinstance(k, Normalized) else prepare(k, t)
    grid = _grid(default_grid(ARC_RANGE) if grid is None else grid, ARC_RANGE, "x")
    probes = []
    for x in grid:
        t1 = _param_at_abscissa(nd, x)
        probes.append(ChordArcProbe(x, _arc(nd, nd.t0, t1), x, x))
    kappa = nd.kappa
    expected = (kappa ** 2 - 2.0 * int(nd.geometry)) / 6.0
    return _fit("arc", grid, [pr.defect for pr in probes], 3.0, 2.0, expected, kappa, probes)


def _crossings(nd: Normalized, a, b):
    cs = nd.disc.chord_intersections(np.asarray(a), np.asarray(b))
    return sorted(cs, key=lambda c: c.seg_param)


def parallel_probe(nd: Normalized, delta: float) -> ChordArcProbe:
    if delta == 0.0:
        return ChordArcProbe(0.0, 0.0, 0.0, 0.0)
    half = _SEARCH_SPAN
    cs = _crossings(nd, [-half, delta], [half, delta])
    if len(cs) < 2:
        raise VerificationError(f"line y = {delta:g} misses the disc near o")
    left, right = cs[0], cs[-1]
    period = nd.disc.period
    t_minus = _unwrap(left.boundary_param, nd.t0, period, forward=False)
    t_plus = _unwrap(right.boundary_param, nd.t0, period, forward=True)
    s = _arc(nd, t_minus, t_plus)
    s_l = raw_distance(nd.geometry, left.point, right.point)
    return ChordArcProbe(delta, s, s_l, float(right.point[0]), float(left.point[0]))


def parallel_defect_fit(k, grid=None, t: float = 0.0) -> FitReport:
    """Arc minus chord for the lines ``y = delta``; order ``delta^(3/2)``."""
    nd = k if isinstance(k, Normalized) else prepare(k, t)
    grid = _grid(default_grid(DELTA_RANGE, 13) if grid is None else grid, DELTA_RANGE, "delta")
    probes = [parallel_probe(nd, d) for d in grid]
    kappa = nd.kappa
    expected = 2.0 * math.sqrt(2.0) / 3.0 * math.sqrt(kappa)
    return _fit("parallel", grid, [pr.defect for pr in probes], 1.5, 1.0, expected, kappa, probes)


def oblique_probe(nd: Normalized, theta: float) -> ChordArcProbe:
    if theta == 0.0:
        return ChordArcProbe(0.0, 0.0, 0.0, 0.0)
    u = np.array([math.cos(theta), math.sin(theta)])
    cs = _crossings(nd, -_SEARCH_SPAN * u, _SEARCH_SPAN * u)
    far = [c for c in cs if c.seg_param > 0.5 + 1e-9]
    if not far:
        raise VerificationError(f"chord at angle {theta:g} has no second crossing")
    c = far[0]
    t1 = _unwrap(c.boundary_param, nd.t0, nd.disc.period, forward=True)
    s = _arc(nd, nd.t0, t1)
    s_l = raw_distance(nd.geometry, origin(nd.geometry), c.point)
    return ChordArcProbe(theta, s, s_l, float(c.point[0]))


def oblique_defect_fit(k, grid=None, t: float = 0.0) -> FitReport:
    """Arc minus chord for chords through ``o`` at angle ``theta``; the
    defect is ``theta^3 / (3 kappa)`` to leading order."""
    nd = k if isinstance(k, Normalized) else prepare(k, t)
    grid = _grid(default_grid(THETA_RANGE) if grid is None else grid, THETA_RANGE, "theta")
    probes = [oblique_probe(nd, th) for th in grid]
    kappa = nd.kappa
    return _fit("oblique", grid, [pr.defect for pr in probes], 3.0, 1.0,
                1.0 / (3.0 * kappa), kappa, probes)


def crossing_ratio(report: FitReport) -> float:
    """``x(theta) / tan(theta)`` at the smallest angle of an oblique fit;
    tends to ``2 / kappa``."""
    pr = report.probes[-1]
    return pr.x_plus / math.tan(pr.param)


def expansion_rows(report: FitReport):
    """CSV rows ``(param, s, s_l, defect, running estimate)``."""
    return [(pr.param, pr.s, pr.s_l, pr.defect, r)
            for pr, r in zip(report.probes, report.running)]
