"""Convex discs and convex polygons in the three constant-curvature models.

Every disc exposes a boundary parametrisation ``t -> point`` over
``[0, period)`` running counter-clockwise, so arc lengths, crossings and
sampling all share one coordinate.  Circles use the central angle in the
frame transported to the centre; smooth Klein discs use the outward-normal
angle of their support function; polygon discs use arc length.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .geom_core import (
    Geometry,
    GeometryError,
    Isometry,
    as_point,
    curve_length,
    distance,
    distances_from,
    pair_distances,
    points_along,
    raw_distance,
    speed,
    translation_to,
)

TWO_PI = 2.0 * math.pi
TANGENCY_TOL = 1e-9
BOUNDARY_TOL = 1e-10
_SEG_EPS = 1e-12
# squared half-chord (support gap for smooth discs) below which a line
# counts as tangent
_TANGENT_SQ = 1e-15


class DiscError(ValueError):
    """Invalid disc or polygon, or a query the disc type does not support."""


class Containment(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Crossing:
    """A point where a geodesic segment meets a disc boundary.

    ``seg_param`` is the arc-length fraction along the segment and
    ``boundary_param`` the disc's own boundary coordinate.
    """

    point: np.ndarray = field(compare=False)
    seg_param: float
    boundary_param: float
    tangent: bool = False


def _pushforward(g: Geometry, m: Isometry, v, dv, ddv=None):
    """Image of a point and its derivatives under an isometry."""
    v = np.asarray(v, dtype=float)
    dv = np.asarray(dv, dtype=float)
    if g is Geometry.SPHERICAL:
        out = [m.matrix @ v, m.matrix @ dv]
        if ddv is not None:
            out.append(m.matrix @ np.asarray(ddv, dtype=float))
        return out
    mm = m.matrix
    h = mm @ np.array([v[0], v[1], 1.0])
    dh = mm @ np.array([dv[0], dv[1], 0.0])
    y = h[:2] / h[2]
    dy = (dh[:2] - y * dh[2]) / h[2]
    if ddv is None:
        return [y, dy]
    ddh = mm @ np.array([ddv[0], ddv[1], 0.0])
    ddy = (ddh[:2] - 2.0 * dy * dh[2] - y * ddh[2]) / h[2]
    return [y, dy, ddy]


# -- polygons ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Polygon:
    """Geodesically convex polygon with counter-clockwise vertices."""

    geometry: Geometry
    vertices: np.ndarray

    def __post_init__(self):
        g = self.geometry
        verts = np.array([as_point(g, v) for v in self.vertices], dtype=float)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise DiscError("a polygon needs at least 3 vertices")
        gaps = pair_distances(g, verts, np.roll(verts, -1, axis=0))
        if np.any(gaps < 1e-12):
            i = int(np.argmin(gaps))
            raise DiscError(f"vertices {i} and {(i + 1) % len(verts)} coincide")
        if not _is_convex_ccw(chart_coords(g, verts)):
            raise DiscError("polygon is not convex and counter-clockwise")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edges(self):
        return self._edges

    @functools.cached_property
    def _edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def side_lengths(self) -> np.ndarray:
        return self._sides

    @functools.cached_property
    def _sides(self) -> np.ndarray:
        return np.array([raw_distance(self.geometry, a, b) for a, b in self.edges()])

    def perimeter(self) -> float:
        return float(self.side_lengths().sum())

    def signed_distance_many(self, pts) -> np.ndarray:
        """Signed distance to the boundary, negative inside.

        Exact inside; outside it is the largest distance to an edge line,
        which has the right sign and vanishes exactly on the boundary.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        g = self.geometry
        nrm, c = self._lines
        if g is Geometry.SPHERICAL:
            vals = -np.arcsin(np.clip(pts @ nrm.T, -1.0, 1.0))
        elif g is Geometry.EUCLIDEAN:
            vals = pts @ nrm.T - c
        else:
            r2 = np.einsum("ij,ij->i", pts, pts)
            vals = np.arcsinh((pts @ nrm.T - c) / (np.sqrt(1.0 - c * c) * np.sqrt(1.0 - r2)[:, None]))
        return vals.max(axis=1)

    @functools.cached_property
    def _lines(self):
        """Unit normals (outward for planar models, left for the sphere) and offsets."""
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        if self.geometry is Geometry.SPHERICAL:
            nrm = np.cross(v, w)
            return nrm / np.linalg.norm(nrm, axis=1)[:, None], np.zeros(len(v))
        d = w - v
        nrm = np.column_stack([d[:, 1], -d[:, 0]]) / np.hypot(d[:, 0], d[:, 1])[:, None]
        return nrm, np.einsum("ij,ij->i", nrm, v)

    def signed_distance(self, p) -> float:
        return float(self.signed_distance_many(p)[0])

    def contains(self, p, tol: float = BOUNDARY_TOL) -> Containment:
        return _classify(self.signed_distance(p), tol)


def chart_coords(g: Geometry, pts) -> np.ndarray:
    """Planar chart in which geodesics are straight lines.

    Identity for the Euclidean and Klein models; gnomonic projection about
    the normalised vertex mean on the sphere, or about any pole of an open
    hemisphere holding the vertices when the mean is not one.
    """
    pts = np.asarray(pts, dtype=float)
    if g is not Geometry.SPHERICAL:
        return pts
    c = pts.sum(axis=0)
    nc = np.linalg.norm(c)
    if nc < 1e-12 or np.any(pts @ c <= 1e-12 * nc):
        c = _hemisphere_pole(pts)
        nc = np.linalg.norm(c)
    c = c / nc
    e1 = np.cross(c, [1.0, 0.0, 0.0] if abs(c[0]) < 0.9 else [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(c, e1)
    proj = pts / (pts @ c)[:, None]
    return np.column_stack([proj @ e1, proj @ e2])


def _hemisphere_pole(pts: np.ndarray) -> np.ndarray:
    """Maximise min_i <p_i, c> over the cube |c|_inf <= 1 (a small LP)."""
    m = len(pts)
    # variables (c, t); minimise -t subject to t - <p_i, c> <= 0
    a_ub = np.column_stack([-pts, np.ones(m)])
    res = optimize.linprog([0.0, 0.0, 0.0, -1.0], A_ub=a_ub, b_ub=np.zeros(m),
                           bounds=[(-1, 1)] * 3 + [(None, 1)], method="highs")
    if not res.success or res.x[3] <= 1e-12:
        raise DiscError("spherical polygon is not contained in an open hemisphere")
    return res.x[:3]


def _is_convex_ccw(xy: np.ndarray) -> bool:
    """Strict left turns at every vertex and total turning of one revolution."""
    u = xy - np.roll(xy, 1, axis=0)
    w = np.roll(u, -1, axis=0)
    cr = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
    if np.any(cr <= 1e-14 * np.hypot(u[:, 0], u[:, 1]) * np.hypot(w[:, 0], w[:, 1])):
        return False
    turning = np.arctan2(cr, np.einsum("ij,ij->i", u, w)).sum()
    return abs(turning - TWO_PI) < 1e-6


def _classify(sd: float, tol: float) -> Containment:
    if sd < -tol:
        return Containment.INSIDE
    if sd > tol:
        return Containment.OUTSIDE
    return Containment.BOUNDARY


def regular_polygon(g: Geometry, n: int, circumradius: float, center=None,
                    phase: float = 0.0) -> Polygon:
    """Regular n-gon with the given geodesic circumradius."""
    c = Circle(g, center, circumradius)
    ts = phase + TWO_PI * np.arange(n) / n
    return Polygon(g, np.array([c.boundary_point(t) for t in ts]))


# -- discs ------------------------------------------------------------------

class ConvexDisc:
    """Common boundary machinery; concrete discs supply the primitives."""

    geometry: Geometry
    period: float = TWO_PI

    # primitives
    def boundary_point(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def boundary_derivative(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def param_of(self, p) -> float:
        raise NotImplementedError

    def signed_distance(self, p) -> float:
        raise NotImplementedError

    def chord_intersections(self, a, b) -> list[Crossing]:
        raise NotImplementedError

    def perimeter(self) -> float:
        raise NotImplementedError

    def arc_length(self, t0: float, t1: float) -> float:
        """Counter-clockwise boundary length from parameter ``t0`` to ``t1``."""
        raise NotImplementedError

    def geodesic_curvature(self, p) -> float:
        raise DiscError(f"{type(self).__name__} has no geodesic curvature")

    def interior_point(self) -> np.ndarray:
        """A point strictly inside the disc."""
        raise NotImplementedError

    def normal_point(self, t: float, s: float) -> np.ndarray:
        """Point at signed distance ``s`` (positive outward) along the
        geodesic normal to the boundary at parameter ``t``."""
        raise DiscError(f"{type(self).__name__} has no boundary normals")

    def normal_points(self, ts, ss) -> np.ndarray:
        return np.array([self.normal_point(t, s) for t, s in zip(ts, ss)])

    def boundary_points(self, ts) -> np.ndarray:
        return np.array([self.boundary_point(t) for t in ts])

    # derived
    def signed_distance_many(self, pts) -> np.ndarray:
        return np.array([self.signed_distance(p) for p in np.atleast_2d(pts)])

    def contains(self, p, tol: float = BOUNDARY_TOL) -> Containment:
        return _classify(self.signed_distance(p), tol)

    def sample_boundary(self, count: int, offset: float = 0.5):
        """Points spaced uniformly in the boundary parameter, with the
        arc-length weight each sample carries."""
        dt = self.period / count
        ts = dt * (np.arange(count) + offset)
        pts = np.array([self.boundary_point(t) for t in ts])
        w = np.array([speed(self.geometry, x, self.boundary_derivative(t)) * dt
                      for x, t in zip(pts, ts)])
        return pts, w


def _check_same_geometry(k: ConvexDisc, g: Geometry):
    if k.geometry is not g:
        raise DiscError(f"geometry mismatch: disc is {k.geometry.label}, got {g.label}")


@dataclass(frozen=True, eq=False)
class Circle(ConvexDisc):
    """Geodesic circle.  ``center=None`` means the model's base point."""

    geometry: Geometry
    center: Optional[np.ndarray]
    radius: float

    def __post_init__(self):
        g = self.geometry
        center = np.array([0.0, 0.0, 1.0]) if g is Geometry.SPHERICAL else np.zeros(2)
        if self.center is not None:
            center = as_point(g, self.center)
        object.__setattr__(self, "center", center)
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DiscError("circle radius must be positive and finite")
        if g is Geometry.SPHERICAL and self.radius >= math.pi / 2:
            raise DiscError("spherical circle radius must be < pi/2 (open hemisphere)")

    @functools.cached_property
    def frame(self) -> Isometry:
        return translation_to(self.geometry, self.center)

    @functools.cached_property
    def _inv(self) -> Isometry:
        return self.frame.inverse()

    @property
    def scale(self) -> float:
        """Circumference per radian of central angle."""
        r = self.radius
        return {Geometry.EUCLIDEAN: r, Geometry.HYPERBOLIC: math.sinh(r),
                Geometry.SPHERICAL: math.sin(r)}[self.geometry]

    @property
    def model_radius(self) -> float:
        """Radius of the base-point-centred copy in model coordinates."""
        r = self.radius
        return {Geometry.EUCLIDEAN: r, Geometry.HYPERBOLIC: math.tanh(r),
                Geometry.SPHERICAL: math.sin(r)}[self.geometry]

    def _local(self, t):
        c, s = math.cos(t), math.sin(t)
        rr = self.model_radius
        if self.geometry is Geometry.SPHERICAL:
            return (np.array([rr * c, rr * s, math.cos(self.radius)]),
                    np.array([-rr * s, rr * c, 0.0]))
        return np.array([rr * c, rr * s]), np.array([-rr * s, rr * c])

    def boundary_point(self, t):
        return self.frame.apply(self._local(t)[0])

    def boundary_derivative(self, t):
        v, dv = self._local(t)
        return _pushforward(self.geometry, self.frame, v, dv)[1]

    def boundary_points(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        rr = self.model_radius
        cols = [rr * np.cos(ts), rr * np.sin(ts)]
        if self.geometry is Geometry.SPHERICAL:
            cols.append(np.full_like(ts, math.cos(self.radius)))
        return self.frame.apply_many(np.column_stack(cols))

    def interior_point(self):
        return self.center

    def normal_point(self, t, s):
        return self.normal_points([t], [s])[0]

    def normal_points(self, ts, ss):
        return self.frame.apply_many(self.local_normal_points(ts, ss))

    def local_normal_points(self, ts, ss):
        """``normal_points`` for the copy centred at the base point."""
        r = self.radius + np.asarray(ss, dtype=float)
        c, sn = np.cos(ts), np.sin(ts)
        g = self.geometry
        if g is Geometry.EUCLIDEAN:
            return np.column_stack([r * c, r * sn])
        if g is Geometry.HYPERBOLIC:
            return np.tanh(r)[:, None] * np.column_stack([c, sn])
        return np.column_stack([np.sin(r) * c, np.sin(r) * sn, np.cos(r)])

    def param_of(self, p):
        q = self._inv.apply(np.asarray(p, dtype=float))
        return math.atan2(q[1], q[0]) % TWO_PI

    def signed_distance(self, p):
        return distance(self.geometry, self.center, p) - self.radius

    def signed_distance_many(self, pts):
        return distances_from(self.geometry, self.center, np.atleast_2d(pts)) - self.radius

    def perimeter(self):
        return TWO_PI * self.scale

    def arc_length(self, t0, t1):
        return self.scale * ((t1 - t0) % TWO_PI)

    def sample_boundary(self, count, offset=0.5):
        ts = TWO_PI * (np.arange(count) + offset) / count
        return self.boundary_points(ts), np.full(count, self.perimeter() / count)

    def geodesic_curvature(self, p):
        if abs(self.signed_distance(p)) > 1e-8:
            raise GeometryError("point is not on the circle")
        r = self.radius
        return {Geometry.EUCLIDEAN: 1.0 / r, Geometry.HYPERBOLIC: 1.0 / math.tanh(r),
                Geometry.SPHERICAL: 1.0 / math.tan(r)}[self.geometry]

    def chord_intersections(self, a, b):
        g = self.geometry
        a = as_point(g, a)
        b = as_point(g, b)
        la, lb = self._inv.apply(a), self._inv.apply(b)
        if g is Geometry.SPHERICAL:
            hits = self._sphere_hits(la, lb)
        else:
            hits = self._planar_hits(la, lb)
        seg_len = distance(g, a, b)
        out = []
        for local, tangent in hits:
            pt = self.frame.apply(local)
            if g is Geometry.SPHERICAL:
                pt = pt / np.linalg.norm(pt)
            out.append(Crossing(pt, _seg_fraction(g, a, pt, seg_len),
                                math.atan2(local[1], local[0]) % TWO_PI, tangent))
        return sorted(out, key=lambda c: c.seg_param)

    def _planar_hits(self, a, b):
        rr = self.model_radius
        d = b - a
        dd = d @ d
        foot_u = -(a @ d) / dd
        h = abs(a[0] * d[1] - a[1] * d[0]) / math.sqrt(dd)
        # squared half-chord; near-tangent lines still have well separated
        # crossings, so tangency is judged on this rather than on h
        q = (rr - h) * (rr + h)
        if q < -_TANGENT_SQ:
            return []
        if q <= _TANGENT_SQ:
            if -_SEG_EPS <= foot_u <= 1 + _SEG_EPS:
                foot = a + foot_u * d
                return [(foot * (rr / math.hypot(*foot)), True)]
            return []
        half = math.sqrt(q) / math.sqrt(dd)
        hits = []
        for u in (foot_u - half, foot_u + half):
            if -_SEG_EPS <= u <= 1 + _SEG_EPS:
                u = min(max(u, 0.0), 1.0)
                p = a + u * d
                hits.append((p * (rr / math.hypot(*p)), False))
        return hits

    def _sphere_hits(self, a, b):
        r = self.radius
        w = b - (a @ b) * a
        w /= np.linalg.norm(w)
        seg = math.atan2(np.linalg.norm(np.cross(a, b)), a @ b)
        phi0 = math.atan2(w[2], a[2])
        amp = math.hypot(a[2], w[2])
        c = math.cos(r) / amp if amp > 0 else math.inf
        if c > 1.0 + _TANGENT_SQ:
            return []
        if c >= 1.0 - _TANGENT_SQ:
            cands = [(phi0, True)]
        else:
            delta = math.acos(c)
            cands = [(phi0 - delta, False), (phi0 + delta, False)]
        hits = []
        for phi, tangent in cands:
            phi %= TWO_PI
            if phi > TWO_PI - _SEG_EPS:
                phi = 0.0
            if phi <= seg + _SEG_EPS:
                phi = min(phi, seg)
                p = math.cos(phi) * a + math.sin(phi) * w
                # snap onto the circle's latitude
                rho = math.hypot(p[0], p[1])
                p = np.array([p[0] / rho * math.sin(r), p[1] / rho * math.sin(r), math.cos(r)])
                hits.append((p, tangent))
        return hits


def _seg_fraction(g: Geometry, a, p, seg_len: float) -> float:
    if seg_len == 0.0:
        return 0.0
    return min(max(raw_distance(g, a, p) / seg_len, 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class KleinSmooth(ConvexDisc):
    """Smooth disc of the Klein model given by a trigonometric support function

        h(phi) = c0 + sum_k cos_k cos(k phi) + sin_k sin(k phi)

    of its Euclidean image.  Euclidean convexity in the Klein model is the
    same as hyperbolic convexity, so any such curve bounds a hyperbolic
    convex disc.
    """

    c0: float
    cos: tuple = ()
    sin: tuple = ()
    geometry: Geometry = Geometry.HYPERBOLIC

    def __post_init__(self):
        if self.geometry is not Geometry.HYPERBOLIC:
            raise DiscError("smooth support-function discs exist only in the Klein model")
        object.__setattr__(self, "cos", tuple(float(x) for x in self.cos))
        object.__setattr__(self, "sin", tuple(float(x) for x in self.sin))
        phi = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        h = self._h(phi, 0)
        rad = h + self._h(phi, 2)
        if np.any(rad <= 0):
            raise DiscError("support function gives a curve that is not strictly convex")
        pts = self._points(phi)
        if np.max(np.einsum("ij,ij->i", pts, pts)) >= 1.0:
            raise DiscError("curve leaves the Klein disc")

    def _h(self, phi, order: int):
        """order-th derivative of the support function."""
        phi = np.asarray(phi, dtype=float)
        out = np.full_like(phi, self.c0 if order == 0 else 0.0)
        for k, a in enumerate(self.cos, start=1):
            out = out + a * k ** order * np.cos(k * phi + order * math.pi / 2)
        for k, b in enumerate(self.sin, start=1):
            out = out + b * k ** order * np.sin(k * phi + order * math.pi / 2)
        return out

    def _points(self, phi):
        phi = np.asarray(phi, dtype=float)
        h, dh = self._h(phi, 0), self._h(phi, 1)
        c, s = np.cos(phi), np.sin(phi)
        return np.column_stack([h * c - dh * s, h * s + dh * c])

    def interior_point(self):
        return self._points(np.linspace(0.0, TWO_PI, 256, endpoint=False)).mean(axis=0)

    def normal_point(self, t, s):
        x = self.boundary_point(t)
        frame = translation_to(self.geometry, x)
        _, dy = _pushforward(self.geometry, frame.inverse(), x, self.boundary_derivative(t))
        out = np.array([dy[1], -dy[0]]) / math.hypot(*dy)
        return frame.apply(math.tanh(s) * out)

    def boundary_points(self, ts):
        return self._points(ts)

    def support(self, phi: float) -> float:
        return float(self._h(phi, 0))

    def boundary_point(self, t):
        return self._points(np.array([t]))[0]

    def boundary_derivative(self, t):
        rad = float(self._h(t, 0) + self._h(t, 2))
        return rad * np.array([-math.sin(t), math.cos(t)])

    def boundary_second_derivative(self, t):
        rad = float(self._h(t, 0) + self._h(t, 2))
        drad = float(self._h(t, 1) + self._h(t, 3))
        c, s = math.cos(t), math.sin(t)
        return drad * np.array([-s, c]) - rad * np.array([c, s])

    def param_of(self, p):
        p = np.asarray(p, dtype=float)
        grid = np.linspace(0.0, TWO_PI, 1024, endpoint=False)
        k = int(np.argmin(np.sum((self._points(grid) - p) ** 2, axis=1)))
        step = TWO_PI / 1024

        def g(phi):
            return (self.boundary_point(phi) - p) @ np.array([-math.sin(phi), math.cos(phi)])

        lo, hi = grid[k] - 1.5 * step, grid[k] + 1.5 * step
        if g(lo) > 0 or g(hi) < 0:
            raise GeometryError("point is not on the boundary")
        phi = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if distance(self.geometry, self.boundary_point(phi), p) > 1e-7:
            raise GeometryError("point is not on the boundary")
        return phi % TWO_PI

    def _support_gap(self, p, phi):
        """sinh of the signed distance from ``p`` to the support line at ``phi``."""
        h = self._h(phi, 0)
        proj = p[0] * np.cos(phi) + p[1] * np.sin(phi)
        return (proj - h) / (np.sqrt(1.0 - h * h) * math.sqrt(1.0 - p @ p))

    def signed_distance(self, p):
        p = as_point(self.geometry, p)
        grid = np.linspace(0.0, TWO_PI, 720, endpoint=False)
        vals = self._support_gap(p, grid)
        k = int(np.argmax(vals))
        step = TWO_PI / 720
        res = optimize.minimize_scalar(lambda t: -float(self._support_gap(p, t)),
                                       bounds=(grid[k] - step, grid[k] + step),
                                       method="bounded", options={"xatol": 1e-12})
        best = max(-res.fun, vals[k])
        return math.asinh(best)

    @functools.cached_property
    def _perimeter(self) -> float:
        return self.arc_length(0.0, TWO_PI)

    def perimeter(self):
        return self._perimeter

    def arc_length(self, t0, t1, tol: float = 1e-12):
        span = (t1 - t0) % TWO_PI
        if span == 0.0 and t1 != t0:
            span = TWO_PI
        return curve_length(self.geometry, self.boundary_point, t0, t0 + span,
                            tol=tol, derivative=self.boundary_derivative)

    def geodesic_curvature(self, p):
        t = self.param_of(p)
        m = translation_to(self.geometry, self.boundary_point(t)).inverse()
        _, dy, ddy = _pushforward(self.geometry, m, self.boundary_point(t),
                                  self.boundary_derivative(t),
                                  self.boundary_second_derivative(t))
        # Christoffel symbols of the Klein metric vanish at the origin, so the
        # Euclidean curvature of the image there is the geodesic curvature.
        return float((dy[0] * ddy[1] - dy[1] * ddy[0]) / math.hypot(*dy) ** 3)

    def chord_intersections(self, a, b):
        g = self.geometry
        a = as_point(g, a)
        b = as_point(g, b)
        d = b - a
        nd = math.hypot(*d)
        nu = np.array([-d[1], d[0]]) / nd
        c = nu @ a
        phi_nu = math.atan2(nu[1], nu[0])

        def f(phi):
            return float(nu @ self.boundary_point(phi) - c)

        top = f(phi_nu)
        bottom = f(phi_nu + math.pi)
        if top < -_TANGENT_SQ or bottom > _TANGENT_SQ:
            return []
        if abs(top) <= _TANGENT_SQ or abs(bottom) <= _TANGENT_SQ:
            phis, tangent = [phi_nu if abs(top) <= _TANGENT_SQ else phi_nu + math.pi], True
        else:
            phis = [optimize.brentq(f, phi_nu, phi_nu + math.pi, xtol=1e-14),
                    optimize.brentq(f, phi_nu + math.pi, phi_nu + TWO_PI, xtol=1e-14)]
            tangent = False
        seg_len = distance(g, a, b)
        out = []
        for phi in phis:
            pt = self.boundary_point(phi)
            u = (pt - a) @ d / (nd * nd)
            if -_SEG_EPS <= u <= 1 + _SEG_EPS:
                out.append(Crossing(pt, _seg_fraction(g, a, pt, seg_len), phi % TWO_PI, tangent))
        return sorted(out, key=lambda x: x.seg_param)


@dataclass(frozen=True, eq=False)
class PolygonDisc(ConvexDisc):
    """A convex polygon viewed as a disc; boundary parameter is arc length."""

    polygon: Polygon

    @property
    def geometry(self):
        return self.polygon.geometry

    @functools.cached_property
    def _cum(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.polygon.side_lengths())])

    @property
    def period(self):
        return float(self._cum[-1])

    def perimeter(self):
        return self.period

    def interior_point(self):
        v = self.polygon.vertices.mean(axis=0)
        return v / np.linalg.norm(v) if self.geometry is Geometry.SPHERICAL else v

    def boundary_point(self, t):
        t = t % self.period
        i = min(int(np.searchsorted(self._cum, t, side="right")) - 1, self.polygon.n - 1)
        a, b = self.polygon.edges()[i]
        frac = (t - self._cum[i]) / (self._cum[i + 1] - self._cum[i])
        return points_along(self.geometry, a, b, [frac])[0]

    def param_of(self, p):
        g = self.geometry
        p = np.asarray(p, dtype=float)
        best, best_t = np.inf, 0.0
        for i, (a, b) in enumerate(self.polygon.edges()):
            la, lb = distance(g, a, p), distance(g, p, b)
            slack = la + lb - (self._cum[i + 1] - self._cum[i])
            if slack < best:
                best, best_t = slack, self._cum[i] + la
        if best > 1e-7:
            raise GeometryError("point is not on the polygon boundary")
        return best_t % self.period

    def signed_distance(self, p):
        return self.polygon.signed_distance(p)

    def signed_distance_many(self, pts):
        return self.polygon.signed_distance_many(pts)

    def arc_length(self, t0, t1):
        return (t1 - t0) % self.period

    def sample_boundary(self, count, offset=0.5):
        return sample_polygon(self.polygon, count, offset)

    def chord_intersections(self, a, b):
        g = self.geometry
        a = as_point(g, a)
        b = as_point(g, b)
        seg_len = distance(g, a, b)
        out = []
        for i, (c, d) in enumerate(self.polygon.edges()):
            x = _segment_meet(g, a, b, c, d)
            if x is None:
                continue
            t = self._cum[i] + distance(g, c, x)
            out.append(Crossing(x, _seg_fraction(g, a, x, seg_len), t % self.period, False))
        out.sort(key=lambda x: x.seg_param)
        dedup = []
        for x in out:
            if dedup and abs(x.seg_param - dedup[-1].seg_param) < TANGENCY_TOL:
                continue
            dedup.append(x)
        return dedup


@dataclass(frozen=True, eq=False)
class MovedDisc(ConvexDisc):
    """Image of a circle or smooth disc under an isometry."""

    base: ConvexDisc
    isometry: Isometry

    def __post_init__(self):
        if isinstance(self.base, PolygonDisc):
            raise DiscError("move the polygon's vertices instead")
        _check_same_geometry(self.base, self.isometry.geometry)

    @property
    def geometry(self):
        return self.base.geometry

    @functools.cached_property
    def _inv(self) -> Isometry:
        return self.isometry.inverse()

    def interior_point(self):
        return self.isometry.apply(self.base.interior_point())

    def normal_point(self, t, s):
        return self.isometry.apply(self.base.normal_point(t, s))

    def normal_points(self, ts, ss):
        return self.isometry.apply_many(self.base.normal_points(ts, ss))

    def boundary_points(self, ts):
        return self.isometry.apply_many(self.base.boundary_points(ts))

    def _pull(self, p):
        return self._inv.apply(np.asarray(p, dtype=float))

    def boundary_point(self, t):
        return self.isometry.apply(self.base.boundary_point(t))

    def boundary_derivative(self, t):
        return _pushforward(self.geometry, self.isometry, self.base.boundary_point(t),
                            self.base.boundary_derivative(t))[1]

    def param_of(self, p):
        return self.base.param_of(self._pull(p))

    def signed_distance(self, p):
        return self.base.signed_distance(self._pull(p))

    def signed_distance_many(self, pts):
        return self.base.signed_distance_many(self._inv.apply_many(np.atleast_2d(pts)))

    def perimeter(self):
        return self.base.perimeter()

    def arc_length(self, t0, t1):
        return self.base.arc_length(t0, t1)

    def geodesic_curvature(self, p):
        return self.base.geodesic_curvature(self._pull(p))

    def chord_intersections(self, a, b):
        out = []
        for c in self.base.chord_intersections(self._pull(a), self._pull(b)):
            out.append(Crossing(self.isometry.apply(c.point), c.seg_param,
                                c.boundary_param, c.tangent))
        return out


def _segment_meet(g: Geometry, a, b, c, d):
    """Intersection point of geodesic segments ab and cd, or None if they are
    disjoint or collinear."""
    if g is Geometry.SPHERICAL:
        n1, n2 = np.cross(a, b), np.cross(c, d)
        x = np.cross(n1, n2)
        nx = np.linalg.norm(x)
        if nx < 1e-14 * np.linalg.norm(n1) * np.linalg.norm(n2):
            return None
        x /= nx
        for cand in (x, -x):
            if _on_arc(a, b, cand) and _on_arc(c, d, cand):
                return cand
        return None
    r, s = b - a, d - c
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-14 * math.hypot(*r) * math.hypot(*s):
        return None
    w = c - a
    u = (w[0] * s[1] - w[1] * s[0]) / den
    v = (w[0] * r[1] - w[1] * r[0]) / den
    if -_SEG_EPS <= u <= 1 + _SEG_EPS and -_SEG_EPS <= v <= 1 + _SEG_EPS:
        return a + min(max(u, 0.0), 1.0) * r
    return None


def _on_arc(a, b, x) -> bool:
    ab = math.atan2(np.linalg.norm(np.cross(a, b)), a @ b)
    ax = math.atan2(np.linalg.norm(np.cross(a, x)), a @ x)
    xb = math.atan2(np.linalg.norm(np.cross(x, b)), x @ b)
    return ax + xb - ab < 1e-11


def sample_polygon(poly: Polygon, count: int, offset: float = 0.5):
    """Boundary samples of a polygon spaced uniformly in arc length."""
    lengths = poly.side_lengths()
    total = lengths.sum()
    s = total * (np.arange(count) + offset) / count
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    edge = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, poly.n - 1)
    pts = np.empty((count, poly.geometry.dim))
    for i, (a, b) in enumerate(poly.edges()):
        sel = edge == i
        if np.any(sel):
            pts[sel] = points_along(poly.geometry, a, b, (s[sel] - cum[i]) / lengths[i])
    return pts, np.full(count, total / count)


# -- module-level operations ------------------------------------------------

def perimeter(k: ConvexDisc) -> float:
    return k.perimeter()


def contains(k: ConvexDisc, p, tol: float = BOUNDARY_TOL) -> Containment:
    return k.contains(p, tol)


def chord_intersections(k: ConvexDisc, a, b) -> list[Crossing]:
    return k.chord_intersections(a, b)


def boundary_arc_length(k: ConvexDisc, p, q, orientation: str = "ccw",
                        full: bool = False, tol: float = 1e-8) -> float:
    """Length of the boundary arc from ``p`` to ``q``.

    ``full=True`` with ``p == q`` returns the whole perimeter.
    """
    for x in (p, q):
        if abs(k.signed_distance(x)) > tol:
            raise GeometryError("point is not on the disc boundary")
    if orientation not in ("ccw", "cw"):
        raise ValueError("orientation must be 'ccw' or 'cw'")
    if full and np.allclose(p, q, atol=1e-12):
        return k.perimeter()
    tp, tq = k.param_of(p), k.param_of(q)
    if orientation == "cw":
        tp, tq = tq, tp
    return k.arc_length(tp, tq)


def geodesic_curvature(k: ConvexDisc, p) -> float:
    if isinstance(k, PolygonDisc):
        raise DiscError("polygon discs have no geodesic curvature")
    return k.geodesic_curvature(p)


def make_polygon(g: Geometry, vertices: Sequence) -> Polygon:
    return Polygon(g, np.asarray(vertices, dtype=float))
