"""Metric kernel for the three constant-curvature planes.

Points are numpy arrays in model coordinates:

* Euclidean plane (curvature 0): Cartesian pair.
* Hyperbolic plane (curvature -1): Beltrami-Klein pair, ``x**2 + y**2 < 1``.
* Unit sphere (curvature +1): unit 3-vector.

Isometries of all three are represented by 3x3 matrices.  For the planar
models they act on homogeneous coordinates ``(x, y, 1)`` followed by
dehomogenisation (Lorentz transformations for Klein, affine rigid motions for
the Euclidean plane); on the sphere they are rotations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

SPHERE_TOL = 1e-12


class GeometryError(ValueError):
    """A point, length or angle lies outside the domain of an operation."""


class DegenerateGeodesicError(GeometryError):
    """The geodesic between two points is not unique."""


class Geometry(enum.IntEnum):
    """Gaussian curvature of the model."""

    HYPERBOLIC = -1
    EUCLIDEAN = 0
    SPHERICAL = 1

    @classmethod
    def from_name(cls, name: str) -> "Geometry":
        try:
            return {"hyperbolic": cls.HYPERBOLIC, "euclidean": cls.EUCLIDEAN,
                    "spherical": cls.SPHERICAL}[name]
        except KeyError:
            raise ValueError(f"unknown geometry {name!r}") from None

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def dim(self) -> int:
        """Length of a model coordinate vector."""
        return 3 if self is Geometry.SPHERICAL else 2


def origin(g: Geometry) -> np.ndarray:
    """The model's base point: the Cartesian/Klein origin or the north pole."""
    if g is Geometry.SPHERICAL:
        return np.array([0.0, 0.0, 1.0])
    return np.zeros(2)


def as_point(g: Geometry, p) -> np.ndarray:
    """Validate ``p`` as a point of ``g`` and return it as a float array."""
    p = np.asarray(p, dtype=float)
    if p.shape != (g.dim,) or not np.all(np.isfinite(p)):
        raise GeometryError(f"not a {g.label} point: {p!r}")
    if g is Geometry.HYPERBOLIC and p @ p >= 1.0:
        raise GeometryError(f"point {p!r} is outside the Klein disc")
    if g is Geometry.SPHERICAL and abs(math.sqrt(p @ p) - 1.0) > SPHERE_TOL:
        raise GeometryError(f"point {p!r} is not on the unit sphere")
    return p


def _cross2(u, v) -> float:
    return u[0] * v[1] - u[1] * v[0]


def distance(g: Geometry, p, q) -> float:
    return raw_distance(g, as_point(g, p), as_point(g, q))


def raw_distance(g: Geometry, p: np.ndarray, q: np.ndarray) -> float:
    """``distance`` without input validation, for inner loops."""
    if g is Geometry.EUCLIDEAN:
        return math.hypot(*(q - p))
    if g is Geometry.SPHERICAL:
        return math.atan2(np.linalg.norm(np.cross(p, q)), p @ q)
    # tanh^2 d = (|w|^2 - (p x w)^2) / (1 - p.q)^2 with w = q - p; this form
    # keeps the numerator free of cancellation for nearby points.
    w = q - p
    num = w @ w - _cross2(p, w) ** 2
    if num <= 0.0:
        return 0.0
    return math.atanh(min(math.sqrt(num) / (1.0 - p @ q), 1.0))


def distances_from(g: Geometry, p, qs) -> np.ndarray:
    """Vectorised ``distance(g, p, q)`` over the rows of ``qs``."""
    p = np.asarray(p, dtype=float)
    qs = np.asarray(qs, dtype=float)
    if g is Geometry.EUCLIDEAN:
        return np.hypot(*(qs - p).T)
    if g is Geometry.SPHERICAL:
        return np.arctan2(np.linalg.norm(np.cross(p, qs), axis=1), qs @ p)
    w = qs - p
    num = np.einsum("ij,ij->i", w, w) - (p[0] * w[:, 1] - p[1] * w[:, 0]) ** 2
    ratio = np.sqrt(np.clip(num, 0.0, None)) / (1.0 - qs @ p)
    return np.arctanh(np.clip(ratio, 0.0, 1.0))


def pair_distances(g: Geometry, ps, qs) -> np.ndarray:
    """Row-wise ``raw_distance(g, ps[i], qs[i])``."""
    ps = np.asarray(ps, dtype=float)
    qs = np.asarray(qs, dtype=float)
    if g is Geometry.EUCLIDEAN:
        return np.hypot(*(qs - ps).T)
    if g is Geometry.SPHERICAL:
        return np.arctan2(np.linalg.norm(np.cross(ps, qs), axis=1),
                          np.einsum("ij,ij->i", ps, qs))
    w = qs - ps
    num = np.einsum("ij,ij->i", w, w) - (ps[:, 0] * w[:, 1] - ps[:, 1] * w[:, 0]) ** 2
    ratio = np.sqrt(np.clip(num, 0.0, None)) / (1.0 - np.einsum("ij,ij->i", ps, qs))
    return np.arctanh(np.clip(ratio, 0.0, 1.0))


def chord_midpoints(g: Geometry, ps, qs) -> np.ndarray:
    """A point strictly between ``ps[i]`` and ``qs[i]`` on their geodesic
    (the model midpoint; not the geodesic midpoint except in the plane)."""
    m = 0.5 * (np.asarray(ps, dtype=float) + np.asarray(qs, dtype=float))
    if g is Geometry.SPHERICAL:
        m /= np.linalg.norm(m, axis=1)[:, None]
    return m


def klein_coords(p) -> tuple[float, float]:
    """Hyperbolic coordinates ``(x_h, y_h)`` of a Klein point.

    ``x_h`` is the signed distance from the y-axis foot and ``y_h`` the
    signed distance from the x-axis along the perpendicular.
    """
    x, y = np.asarray(p, dtype=float)
    if abs(x) >= 1.0:
        raise GeometryError(f"|x| = {abs(x)} >= 1 has no hyperbolic coordinates")
    w = math.sqrt(1.0 - x * x)
    if abs(y) >= w:
        raise GeometryError(f"point ({x}, {y}) is outside the Klein disc")
    xh = 0.5 * math.log((1.0 + x) / (1.0 - x))
    yh = 0.5 * math.log((w + y) / (w - y))
    return xh, yh


# -- isometries -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Isometry:
    """An isometry of one model, stored as a 3x3 matrix."""

    geometry: Geometry
    matrix: np.ndarray

    @property
    def orientation(self) -> int:
        """+1 for orientation-preserving maps, -1 for reflections."""
        return 1 if np.linalg.det(self.matrix) > 0 else -1

    def __call__(self, p) -> np.ndarray:
        return self.apply(p)

    def apply(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.geometry is Geometry.SPHERICAL:
            v = self.matrix @ p
            return v / np.linalg.norm(v, axis=0)
        m = self.matrix
        if p.ndim == 1:
            x, y = p
            w = m[2, 0] * x + m[2, 1] * y + m[2, 2]
            return np.array([(m[0, 0] * x + m[0, 1] * y + m[0, 2]) / w,
                             (m[1, 0] * x + m[1, 1] * y + m[1, 2]) / w])
        h = m[:, :2] @ p + m[:, 2:]
        return h[:2] / h[2]

    def apply_many(self, pts) -> np.ndarray:
        """Apply to an ``(N, dim)`` array of points."""
        pts = np.asarray(pts, dtype=float)
        return self.apply(pts.T).T

    def inverse(self) -> "Isometry":
        return Isometry(self.geometry, np.linalg.inv(self.matrix))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        if other.geometry is not self.geometry:
            raise ValueError("cannot compose isometries of different geometries")
        return Isometry(self.geometry, self.matrix @ other.matrix)


def identity(g: Geometry) -> Isometry:
    return Isometry(g, np.eye(3))


def rotation(g: Geometry, angle: float) -> Isometry:
    """Rotation by ``angle`` about the model's base point."""
    c, s = math.cos(angle), math.sin(angle)
    return Isometry(g, np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]))


def reflection_y(g: Geometry) -> Isometry:
    """Reflection in the x-axis (the x-z plane on the sphere)."""
    return Isometry(g, np.diag([1.0, -1.0, 1.0]))


def translation_along_x(g: Geometry, t: float) -> Isometry:
    """Isometry moving the base point a distance ``t`` along the x-axis."""
    if not math.isfinite(t):
        raise GeometryError("translation length must be finite")
    if g is Geometry.EUCLIDEAN:
        m = np.array([[1.0, 0.0, t], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    elif g is Geometry.HYPERBOLIC:
        ch, sh = math.cosh(t), math.sinh(t)
        m = np.array([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]])
    else:
        c, s = math.cos(t), math.sin(t)
        m = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    return Isometry(g, m)


def translation_to(g: Geometry, p) -> Isometry:
    """Isometry taking the base point to ``p`` along the joining geodesic.

    Directions at the base point are carried to directions at ``p`` without
    an extra twist (the map is ``R(phi) T(d) R(-phi)``).
    """
    p = as_point(g, p)
    if g is Geometry.SPHERICAL:
        d = math.atan2(math.hypot(p[0], p[1]), p[2])
        phi = math.atan2(p[1], p[0]) if d > 0 else 0.0
        if d > math.pi - 1e-12:
            raise DegenerateGeodesicError("south pole has no unique geodesic to the base point")
    else:
        d = distance(g, origin(g), p)
        phi = math.atan2(p[1], p[0]) if d > 0 else 0.0
    return rotation(g, phi) @ translation_along_x(g, d) @ rotation(g, -phi)


def frame_at(g: Geometry, p, direction: float = 0.0) -> Isometry:
    """Isometry sending the base point to ``p``; the x-axis direction at the
    base point goes to the direction ``direction`` measured in the transported
    frame at ``p``."""
    return translation_to(g, p) @ rotation(g, direction)


# -- geodesics and angles ---------------------------------------------------

def geodesic_point(g: Geometry, p, q, t: float) -> np.ndarray:
    """Point at arc-length fraction ``t`` along the geodesic segment ``pq``."""
    p = as_point(g, p)
    q = as_point(g, q)
    if np.array_equal(p, q):
        raise GeometryError("geodesic through coincident points is undefined")
    if g is Geometry.EUCLIDEAN:
        return p + t * (q - p)
    if g is Geometry.SPHERICAL:
        w = q - (p @ q) * p
        nw = np.linalg.norm(w)
        if nw < 1e-15:
            raise DegenerateGeodesicError("antipodal points have no unique geodesic")
        d = distance(g, p, q)
        x = math.cos(t * d) * p + math.sin(t * d) * (w / nw)
        return x / np.linalg.norm(x)
    m = translation_to(g, p)
    qq = m.inverse().apply(q)
    d = distance(g, p, q)
    u = qq / np.linalg.norm(qq)
    return m.apply(math.tanh(t * d) * u)


def points_along(g: Geometry, p, q, fractions) -> np.ndarray:
    """Vectorised ``geodesic_point`` for an array of fractions; ``(N, dim)``."""
    fr = np.asarray(fractions, dtype=float)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if g is Geometry.EUCLIDEAN:
        return p + fr[:, None] * (q - p)
    d = raw_distance(g, p, q)
    if g is Geometry.SPHERICAL:
        w = q - (p @ q) * p
        w = w / np.linalg.norm(w)
        return np.cos(fr * d)[:, None] * p + np.sin(fr * d)[:, None] * w
    m = translation_to(g, p)
    qq = m.inverse().apply(q)
    u = qq / np.linalg.norm(qq)
    local = np.tanh(fr * d)[:, None] * u
    return m.apply_many(local)


def direction_at(g: Geometry, apex, p) -> float:
    """Angle of the geodesic ``apex -> p`` in the transported frame at ``apex``."""
    apex = as_point(g, apex)
    p = as_point(g, p)
    if np.allclose(apex, p, rtol=0.0, atol=1e-15):
        raise GeometryError("direction to a coincident point is undefined")
    if g is Geometry.EUCLIDEAN:
        v = p - apex
        return math.atan2(v[1], v[0])
    v = translation_to(g, apex).inverse().apply(p)
    return math.atan2(v[1], v[0])


def angle_at(g: Geometry, apex, p, q) -> float:
    """Riemannian angle in ``[0, pi]`` between geodesics ``apex->p`` and ``apex->q``."""
    a = direction_at(g, apex, p)
    b = direction_at(g, apex, q)
    diff = abs(a - b) % (2.0 * math.pi)
    return min(diff, 2.0 * math.pi - diff)


def side_from_angle(g: Geometry, a: float, b: float, gamma: float) -> float:
    """Side opposite ``gamma`` in a triangle with sides ``a``, ``b``."""
    if a <= 0 or b <= 0 or not 0 < gamma < math.pi:
        raise GeometryError("need a, b > 0 and 0 < gamma < pi")
    if g is Geometry.EUCLIDEAN:
        return math.sqrt(a * a + b * b - 2.0 * a * b * math.cos(gamma))
    if g is Geometry.SPHERICAL:
        if a >= math.pi or b >= math.pi:
            raise GeometryError("spherical sides must be shorter than pi")
        c = math.cos(a) * math.cos(b) + math.sin(a) * math.sin(b) * math.cos(gamma)
        return math.acos(max(-1.0, min(1.0, c)))
    c = math.cosh(a) * math.cosh(b) - math.sinh(a) * math.sinh(b) * math.cos(gamma)
    return math.acosh(max(1.0, c))


def angle_from_sides(g: Geometry, a: float, b: float, c: float) -> float:
    """Angle opposite ``c`` in the triangle with sides ``a, b, c``."""
    if g is Geometry.EUCLIDEAN:
        cg = (a * a + b * b - c * c) / (2.0 * a * b)
    elif g is Geometry.SPHERICAL:
        cg = (math.cos(c) - math.cos(a) * math.cos(b)) / (math.sin(a) * math.sin(b))
    else:
        cg = (math.cosh(a) * math.cosh(b) - math.cosh(c)) / (math.sinh(a) * math.sinh(b))
    return math.acos(max(-1.0, min(1.0, cg)))


def exp_map(g: Geometry, base, u) -> np.ndarray:
    """Geodesic normal coordinates: rows of ``u`` (tangent vectors at ``base``
    in the transported frame) to points, ``(N, dim)``."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    r = np.hypot(u[:, 0], u[:, 1])
    safe = np.where(r > 0, r, 1.0)
    dirs = u / safe[:, None]
    if g is Geometry.EUCLIDEAN:
        local = u
    elif g is Geometry.HYPERBOLIC:
        local = np.tanh(r)[:, None] * dirs
    else:
        local = np.column_stack([np.sin(r)[:, None] * dirs, np.cos(r)])
    return translation_to(g, base).apply_many(local)


def log_map(g: Geometry, base, pts) -> np.ndarray:
    """Inverse of ``exp_map``."""
    local = translation_to(g, base).inverse().apply_many(np.atleast_2d(pts))
    if g is Geometry.EUCLIDEAN:
        return local
    planar = local[:, :2]
    rho = np.hypot(planar[:, 0], planar[:, 1])
    safe = np.where(rho > 0, rho, 1.0)
    if g is Geometry.HYPERBOLIC:
        r = np.arctanh(rho)
    else:
        r = np.arctan2(rho, local[:, 2])
    return planar * (r / safe)[:, None]


# -- arc length -------------------------------------------------------------

def speed(g: Geometry, p, dp) -> float:
    """Riemannian norm of the tangent vector ``dp`` at ``p``."""
    if g is Geometry.HYPERBOLIC:
        x, y = p
        dx, dy = dp
        w = 1.0 - x * x - y * y
        if w <= 0.0:
            raise GeometryError("curve leaves the Klein disc")
        q = (1 - y * y) * dx * dx + 2 * x * y * dx * dy + (1 - x * x) * dy * dy
        return math.sqrt(max(q, 0.0)) / w
    if g is Geometry.SPHERICAL:
        # tangential part only; radial drift of an off-sphere curve is ignored
        dp = np.asarray(dp, dtype=float)
        p = np.asarray(p, dtype=float)
        p = p / np.linalg.norm(p)
        return float(np.linalg.norm(dp - (dp @ p) * p))
    return math.hypot(dp[0], dp[1])


def _numeric_derivative(curve: Callable, t: float, h: float = 1e-3) -> np.ndarray:
    # five-point stencil
    return (-np.asarray(curve(t + 2 * h)) + 8 * np.asarray(curve(t + h))
            - 8 * np.asarray(curve(t - h)) + np.asarray(curve(t - 2 * h))) / (12 * h)


def curve_length(g: Geometry, curve: Callable, t0: float, t1: float,
                 tol: float = 1e-10, derivative: Optional[Callable] = None) -> float:
    """Length of ``curve`` on ``[t0, t1]`` by adaptive Gauss-Kronrod quadrature
    of the line element.  Pass ``derivative`` whenever it is known; the
    fallback finite-difference stencil limits accuracy to roughly 1e-10.
    """
    if t1 == t0:
        return 0.0
    deriv = derivative or (lambda t: _numeric_derivative(curve, t))

    def integrand(t):
        return speed(g, curve(t), deriv(t))

    val, _ = integrate.quad(integrand, t0, t1, epsabs=tol, epsrel=0.0, limit=500)
    return val
