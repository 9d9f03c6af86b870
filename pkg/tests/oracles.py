"""Reference computations written without the package's geometry code.

Distances use the hyperboloid and the ambient dot product; boundaries are
discretised explicitly and classified by half-plane tests.
"""

import math

import mpmath as mp
import numpy as np
from scipy.spatial import ConvexHull

from curvdev.geom_core import Geometry

E, H, S = Geometry.EUCLIDEAN, Geometry.HYPERBOLIC, Geometry.SPHERICAL


def to_hyperboloid(p):
    p = np.asarray(p, dtype=float)
    w = 1.0 / np.sqrt(1.0 - np.sum(p * p, axis=-1))
    return np.concatenate([w[..., None] * p, w[..., None]], axis=-1)


def dist(g, p, q):
    p, q = np.asarray(p, float), np.asarray(q, float)
    if g is E:
        return np.linalg.norm(p - q, axis=-1)
    if g is S:
        c = np.linalg.norm(np.cross(p, q), axis=-1)
        return np.arctan2(c, np.sum(p * q, axis=-1))
    # 2 asinh(|a - b|_L / 2) with the Lorentzian norm of the difference,
    # which keeps relative precision for nearby points
    dd = to_hyperboloid(p) - to_hyperboloid(q)
    sq = dd[..., 0] ** 2 + dd[..., 1] ** 2 - dd[..., 2] ** 2
    return 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(sq, 0.0)))


def circle_points(g, r, ts):
    """Boundary of the circle of radius r about the base point."""
    c, s = np.cos(ts), np.sin(ts)
    if g is E:
        return r * np.column_stack([c, s])
    if g is H:
        return math.tanh(r) * np.column_stack([c, s])
    return np.column_stack([math.sin(r) * c, math.sin(r) * s, np.full_like(ts, math.cos(r))])


def circle_perimeter(g, r):
    return 2 * math.pi * {E: r, H: math.sinh(r), S: math.sin(r)}[g]


def random_convex_polygon(g, rng, n_max=8, spread=None):
    """Convex hull of random points, counter-clockwise, in model coordinates.

    Klein and gnomonic charts send geodesics to lines, so a planar hull is a
    geodesically convex polygon.
    """
    spread = spread or {E: 1.6, H: 0.93, S: 2.0}[g]
    while True:
        k = rng.integers(3, n_max + 1)
        if g is H:
            rad = spread * np.sqrt(rng.random(k))
            ang = rng.uniform(0, 2 * math.pi, k)
            xy = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        else:
            xy = rng.uniform(-spread, spread, (k, 2))
        try:
            hull = ConvexHull(xy)
        except Exception:
            continue
        v = xy[hull.vertices]
        if len(v) < 3 or _min_turn(v) < 1e-3:
            continue
        if g is S:
            v = np.column_stack([v, np.ones(len(v))])
            v /= np.linalg.norm(v, axis=1)[:, None]
        return v


def _min_turn(xy):
    u = xy - np.roll(xy, 1, axis=0)
    w = np.roll(u, -1, axis=0)
    cr = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
    return np.min(cr / (np.linalg.norm(u, axis=1) * np.linalg.norm(w, axis=1)))


def _edge_points(g, a, b, m):
    f = (np.arange(m) + 0.5) / m
    f = np.concatenate([[0.0], f, [1.0]])
    if g is S:
        om = math.atan2(np.linalg.norm(np.cross(a, b)), a @ b)
        return (np.sin((1 - f) * om)[:, None] * a + np.sin(f * om)[:, None] * b) / math.sin(om)
    return a + f[:, None] * (b - a)


def _inside_polygon(g, verts, pts):
    ok = np.ones(len(pts), dtype=bool)
    nv = len(verts)
    for i in range(nv):
        a, b = verts[i], verts[(i + 1) % nv]
        if g is S:
            ok &= pts @ np.cross(a, b) > 0
        else:
            d = b - a
            ok &= d[0] * (pts[:, 1] - a[1]) - d[1] * (pts[:, 0] - a[0]) > 0
    return ok


def _inside_circle(g, r, pts):
    base = np.array([0.0, 0.0, 1.0]) if g is S else np.zeros(2)
    return dist(g, pts, base) < r


def discrete_dev(g, r, verts, m=200_000):
    """dev of the base-point circle of radius r and a polygon, by midpoint
    classification of a fine discretisation of both boundaries."""
    ts = np.linspace(0.0, 2 * math.pi, m + 1)
    cp = circle_points(g, r, ts)
    seg = dist(g, cp[:-1], cp[1:])
    mid = circle_points(g, r, 0.5 * (ts[:-1] + ts[1:]))
    per_k = seg.sum()
    inter = seg[_inside_polygon(g, verts, mid)].sum()
    per_p = 0.0
    per_edge = max(m // len(verts), 1000)
    for i in range(len(verts)):
        a, b = verts[i], verts[(i + 1) % len(verts)]
        q = _edge_points(g, a, b, per_edge)
        seg = dist(g, q[:-1], q[1:])
        # midpoint of each small piece, in the model (exact on the sphere after normalising)
        mids = 0.5 * (q[:-1] + q[1:])
        if g is S:
            mids /= np.linalg.norm(mids, axis=1)[:, None]
        per_p += seg.sum()
        inter += seg[_inside_circle(g, r, mids)].sum()
    return per_k + per_p - 2 * inter


# -- spherical regular triangles, high precision ---------------------------

mp.mp.dps = 40


def mp_side(d):
    return mp.acos(mp.cos(d) ** 2 - mp.sin(d) ** 2 / 2)


def mp_inradius(d):
    return mp.acos(mp.cos(d) / mp.cos(mp_side(d) / 2))


def mp_f(r, d):
    """Deviation of the regular triangle with circumradius d from K(r),
    from right-triangle trigonometry in the acos forms."""
    r, d = mp.mpf(r), mp.mpf(d)
    l, m = mp_side(d), mp_inradius(d)
    s = mp.acos(mp.cos(r) / mp.cos(m))
    alpha = mp.acos(mp.tan(m) / mp.tan(r))
    return 6 * (2 * alpha * mp.sin(r) - 2 * s + l / 2) - 2 * mp.pi * mp.sin(r)


def mp_d_circ(r):
    return mp.findroot(lambda d: mp_inradius(d) - mp.mpf(r), (mp.mpf(r), mp.pi / 2 - mp.mpf("1e-6")),
                       solver="anderson")
