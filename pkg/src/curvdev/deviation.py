"""Perimeter deviation between a convex disc and a convex polygon.

For convex ``K`` and ``P`` every boundary point of one set lies on exactly one
side of the other, so the boundaries of the union and the intersection
partition ``bd K`` and ``bd P`` (up to finitely many crossings) and

    dev(K, P) = per(K u P) - per(K n P) = per K + per P - 2 per(K n P).

Only ``bd(K n P)`` is ever assembled; the union boundary need not be convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from .discs import (
    BOUNDARY_TOL,
    Circle,
    ConvexDisc,
    DiscError,
    Polygon,
    PolygonDisc,
    _is_convex_ccw,
    chart_coords,
    sample_polygon,
)
from .geom_core import Geometry, chord_midpoints, distance, pair_distances

_PARAM_TOL = 1e-13
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Piece:
    """A maximal portion of one boundary on a single side of the other."""

    kind: str  # "edge" or "arc"
    start: np.ndarray = field(compare=False)
    end: np.ndarray = field(compare=False)
    length: float
    inside: bool
    index: int = -1  # polygon edge index; -1 for arcs


@dataclass(frozen=True)
class DeviationResult:
    dev: float
    per_K: float
    per_P: float
    per_intersection: float
    decomposition: list = field(compare=False)
    crossing_count: int
    pieces: list = field(compare=False, repr=False, default_factory=list)

    @property
    def per_union(self) -> float:
        return self.per_K + self.per_P - self.per_intersection


def _check(k: ConvexDisc, p: Polygon):
    if k.geometry is not p.geometry:
        raise DiscError(f"geometry mismatch: {k.geometry.label} disc, {p.geometry.label} polygon")


def _edge_pieces(k: ConvexDisc, p: Polygon, splits: list[list]) -> list[Piece]:
    """Cut each edge at its crossings; ``splits[i]`` holds ``(u, point)``."""
    g = p.geometry
    # Strictly convex discs cannot share a segment with an edge, so a piece
    # is inside only if it really is; the band is kept for polygon discs
    # whose edges may coincide with the polygon's.
    tol = BOUNDARY_TOL if isinstance(k, PolygonDisc) else 0.0
    starts, ends, owner = [], [], []
    for i, (a, b) in enumerate(p.edges()):
        last_u, last = 0.0, a
        for u, x in sorted(splits[i], key=lambda c: c[0]):
            if u - last_u >= _PARAM_TOL and 1.0 - u >= _PARAM_TOL:
                starts.append(last)
                ends.append(x)
                owner.append(i)
                last_u, last = u, x
        starts.append(last)
        ends.append(b)
        owner.append(i)
    starts, ends = np.array(starts), np.array(ends)
    lengths = pair_distances(g, starts, ends)
    inside = k.signed_distance_many(chord_midpoints(g, starts, ends)) <= tol
    return [Piece("edge", starts[j], ends[j], float(lengths[j]), bool(inside[j]), owner[j])
            for j in range(len(owner))]


def _dedupe_cyclic(ts: list[float], period: float) -> list[float]:
    ts = sorted(t % period for t in ts)
    out: list[float] = []
    for t in ts:
        if out and t - out[-1] < _PARAM_TOL:
            continue
        out.append(t)
    if len(out) > 1 and out[0] + period - out[-1] < _PARAM_TOL:
        out.pop()
    return out


def _arc_pieces(k: ConvexDisc, p: Polygon, params: list[float]) -> list[Piece]:
    period = k.period
    ts = _dedupe_cyclic(params, period)
    band = BOUNDARY_TOL if isinstance(k, PolygonDisc) else 0.0
    if not ts:
        q = k.boundary_point(0.0)
        inside = p.signed_distance(q) < -band
        return [Piece("arc", q, q, k.perimeter(), bool(inside))]
    m = len(ts)
    spans = [period] if m == 1 else [(ts[(j + 1) % m] - t0) % period for j, t0 in enumerate(ts)]
    ends = k.boundary_points(ts)
    mids = k.boundary_points([t0 + 0.5 * sp for t0, sp in zip(ts, spans)])
    inside = p.signed_distance_many(mids) < -band
    pieces = []
    for j, t0 in enumerate(ts):
        length = k.perimeter() if m == 1 else k.arc_length(t0, ts[(j + 1) % m])
        pieces.append(Piece("arc", ends[j], ends[(j + 1) % m], length, bool(inside[j])))
    return pieces


def _crossings_from_polygon(k: ConvexDisc, p: Polygon):
    splits, params = [], []
    for a, b in p.edges():
        cs = k.chord_intersections(a, b)
        splits.append([(c.seg_param, c.point) for c in cs])
        params.extend(c.boundary_param for c in cs)
    return splits, params


def _crossings_from_disc(k: ConvexDisc, p: Polygon, samples: int = 4096):
    """Locate crossings by root-finding the polygon's signed distance along
    the disc boundary, then assign each crossing to the polygon edge it lies on."""
    period = k.period
    ts = period * np.arange(samples + 1) / samples
    pts = np.array([k.boundary_point(t) for t in ts])
    sd = p.signed_distance_many(pts)

    def s(t):
        return p.signed_distance(k.boundary_point(t))

    params = []
    for j in range(samples):
        if sd[j] == 0.0:
            params.append(ts[j])
        elif sd[j] * sd[j + 1] < 0.0:
            params.append(optimize.brentq(s, ts[j], ts[j + 1], xtol=1e-15))
    # vertices touching the boundary without a sign change
    for v in p.vertices:
        if abs(k.signed_distance(v)) <= 1e-9:
            params.append(k.param_of(v))
    g = p.geometry
    splits = [[] for _ in range(p.n)]
    edges = p.edges()
    lengths = p.side_lengths()
    for t in params:
        x = k.boundary_point(t)
        slack = [distance(g, a, x) + distance(g, x, b) - lengths[i]
                 for i, (a, b) in enumerate(edges)]
        i = int(np.argmin(slack))
        splits[i].append((distance(g, edges[i][0], x) / lengths[i], x))
    return splits, params


def _order_cyclically(pieces: list[Piece]) -> list[Piece]:
    if not pieces:
        return []
    left = list(pieces)
    out = [left.pop(0)]
    while left:
        end = out[-1].end
        j = min(range(len(left)), key=lambda i: float(np.sum((left[i].start - end) ** 2)))
        out.append(left.pop(j))
    return out


def _count_crossings(edge_pieces: list[Piece]) -> int:
    flags = [pc.inside for pc in edge_pieces if pc.length > 0.0]
    if not flags:
        return 0
    return sum(1 for a, b in zip(flags, flags[1:] + flags[:1]) if a != b)


def intersection_boundary(k: ConvexDisc, p: Polygon, perspective: str = "polygon") -> list[Piece]:
    """Ordered pieces of ``bd(K n P)``: polygon-edge portions inside ``K``
    and boundary arcs of ``K`` inside ``P``."""
    return dev(k, p, perspective).decomposition


def dev(k: ConvexDisc, p: Polygon, perspective: str = "polygon",
        ordered: bool = True) -> DeviationResult:
    """Perimeter deviation ``per(K u P) - per(K n P)``.

    ``perspective`` selects how crossings are found: by intersecting each
    polygon edge with ``bd K`` (the default), or by root-finding along
    ``bd K``.  Both give the same value up to root-finding tolerance.
    ``ordered=False`` skips chaining the pieces of ``bd(K n P)`` into
    boundary order, which only matters for display.
    """
    _check(k, p)
    if perspective == "polygon":
        splits, params = _crossings_from_polygon(k, p)
    elif perspective == "disc":
        splits, params = _crossings_from_disc(k, p)
    else:
        raise ValueError("perspective must be 'polygon' or 'disc'")
    edges = _edge_pieces(k, p, splits)
    arcs = _arc_pieces(k, p, params)
    inner = [pc for pc in edges + arcs if pc.inside]
    per_int = math.fsum(pc.length for pc in inner)
    per_k, per_p = k.perimeter(), p.perimeter()
    return DeviationResult(
        dev=per_k + per_p - 2.0 * per_int,
        per_K=per_k,
        per_P=per_p,
        per_intersection=per_int,
        decomposition=_order_cyclically(inner) if ordered else inner,
        crossing_count=_count_crossings(edges),
        pieces=edges + arcs,
    )


def circle_dev(k: Circle, vertices, local: bool = False) -> float:
    """``dev(k, Polygon(vertices)).dev`` for a circle, in closed form.

    Works in the frame where ``k`` is centred at the base point: each edge
    meets the disc in one interval (convexity), found from a quadratic in
    the plane and the Klein model or a cosine equation on the sphere, and
    the circle's arcs between crossings are classified by half-plane tests.
    ``local=True`` means ``vertices`` are already in that frame.  Raises
    ``DiscError`` for polygons ``Polygon`` would reject.
    """
    g = k.geometry
    v = np.asarray(vertices, dtype=float)
    if not local:
        v = k._inv.apply_many(v)
    if len(v) < 3 or not np.all(np.isfinite(v)):
        raise DiscError("need at least 3 finite vertices")
    if g is Geometry.HYPERBOLIC and np.any(np.einsum("ij,ij->i", v, v) >= 1.0):
        raise DiscError("vertex outside the Klein disc")
    a, b = v, np.roll(v, -1, axis=0)
    sides = pair_distances(g, a, b)
    if np.any(sides < 1e-12):
        raise DiscError("consecutive vertices coincide")
    if not _is_convex_ccw(chart_coords(g, v)):
        raise DiscError("polygon is not convex and counter-clockwise")
    if g is Geometry.SPHERICAL:
        inside_len, angles, side_of = _sphere_edges(k.radius, a, b)
    else:
        inside_len, angles, side_of = _planar_edges(g, k.model_radius, a, b)
    per_k = k.perimeter()
    if len(angles) == 0:
        mids = np.zeros(1)
        gaps = np.array([TWO_PI])
    else:
        angles = np.sort(np.mod(angles, TWO_PI))
        gaps = np.diff(np.append(angles, angles[0] + TWO_PI))
        mids = angles + 0.5 * gaps
    inside = side_of(mids)
    per_int = inside_len.sum() + k.scale * gaps[inside].sum()
    return float(per_k + sides.sum() - 2.0 * per_int)


def _planar_edges(g, rr, a, b):
    d = b - a
    qa = np.einsum("ij,ij->i", d, d)
    qb = 2.0 * np.einsum("ij,ij->i", a, d)
    qc = np.einsum("ij,ij->i", a, a) - rr * rr
    disc = qb * qb - 4.0 * qa * qc
    sq = np.sqrt(np.clip(disc, 0.0, None))
    u_lo = (-qb - sq) / (2.0 * qa)
    u_hi = (-qb + sq) / (2.0 * qa)
    hit = disc > 0.0
    lo, hi = np.clip(u_lo, 0.0, 1.0), np.clip(u_hi, 0.0, 1.0)
    seg = hit & (hi > lo)
    inside_len = np.zeros(len(a))
    if np.any(seg):
        p = a[seg] + lo[seg, None] * d[seg]
        q = a[seg] + hi[seg, None] * d[seg]
        inside_len[seg] = pair_distances(g, p, q)
    us = np.concatenate([u_lo[hit], u_hi[hit]])
    idx = np.concatenate([np.nonzero(hit)[0]] * 2)
    keep = (us >= 0.0) & (us <= 1.0)
    pts = a[idx[keep]] + us[keep, None] * d[idx[keep]]
    angles = np.arctan2(pts[:, 1], pts[:, 0])

    def side_of(theta):
        x = rr * np.column_stack([np.cos(theta), np.sin(theta)])
        cr = (d[None, :, 0] * (x[:, None, 1] - a[None, :, 1])
              - d[None, :, 1] * (x[:, None, 0] - a[None, :, 0]))
        return np.all(cr > 0.0, axis=1)

    return inside_len, angles, side_of


def _sphere_edges(r, a, b):
    dot = np.einsum("ij,ij->i", a, b)
    w = b - dot[:, None] * a
    w /= np.linalg.norm(w, axis=1)[:, None]
    seg = np.arctan2(np.linalg.norm(np.cross(a, b), axis=1), dot)
    amp = np.hypot(a[:, 2], w[:, 2])
    phi0 = np.arctan2(w[:, 2], a[:, 2])
    # representative in [-pi/2, 3pi/2): the cap interval of half-width < pi/2
    # about it is the only copy that can meet [0, seg] with seg < pi
    phi0 = np.mod(phi0 + 0.5 * math.pi, TWO_PI) - 0.5 * math.pi
    c = np.divide(math.cos(r), amp, out=np.full_like(amp, np.inf), where=amp > 0)
    hit = c < 1.0
    delta = np.arccos(np.clip(c, -1.0, 1.0))
    lo, hi = np.maximum(phi0 - delta, 0.0), np.minimum(phi0 + delta, seg)
    inside_len = np.where(hit & (hi > lo), hi - lo, 0.0)
    phis = np.concatenate([phi0 - delta, phi0 + delta])
    idx = np.concatenate([np.arange(len(a))] * 2)
    keep = np.concatenate([hit, hit]) & (phis >= 0.0) & (phis <= np.concatenate([seg, seg]))
    phis, idx = phis[keep], idx[keep]
    pts = np.cos(phis)[:, None] * a[idx] + np.sin(phis)[:, None] * w[idx]
    angles = np.arctan2(pts[:, 1], pts[:, 0])
    nrm = np.cross(a, b)
    sr, cr = math.sin(r), math.cos(r)

    def side_of(theta):
        x = np.column_stack([sr * np.cos(theta), sr * np.sin(theta), np.full_like(theta, cr)])
        return np.all(x @ nrm.T > 0.0, axis=1)

    return inside_len, angles, side_of


def sampled_dev(k: ConvexDisc, p: Polygon, count: int = 1_000_000,
                rng: Optional[np.random.Generator] = None) -> float:
    """Deviation estimated by classifying jittered, arc-length-uniform
    samples of both boundaries.  Independent of the crossing computation;
    error is about one sample spacing per crossing."""
    _check(k, p)
    offset = 0.5 if rng is None else float(rng.random())
    kp, kw = k.sample_boundary(count, offset)
    pp, pw = sample_polygon(p, count, offset)
    k_in = p.signed_distance_many(kp) < 0.0
    p_in = k.signed_distance_many(pp) <= 0.0
    per_int = kw[k_in].sum() + pw[p_in].sum()
    return kw.sum() + pw.sum() - 2.0 * per_int
