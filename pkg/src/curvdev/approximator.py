"""Best-approximating n-gons of a convex disc under perimeter deviation.

Two searches are provided.  ``best_inscribed`` keeps every vertex on the
boundary and maximises the polygon's perimeter, which for a polygon inside
``K`` is the same as minimising ``dev``.  ``best_free`` lets vertices move
anywhere and minimises ``dev`` directly, so it can confirm or refute that the
optimum is inscribed.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from . import deviation
from .discs import Circle, ConvexDisc, DiscError, Polygon, PolygonDisc
from .geom_core import Geometry, raw_distance
from .search import golden_section

INSCRIBED_STARTS = 8
FREE_STARTS = 16
COLLAPSE_TOL = 1e-9
# simplex size at which Nelder-Mead may stop (chart units)
XATOL = 1e-8


class UsageError(ValueError):
    """Invalid arguments to an approximation routine."""


@dataclass
class ApproxReport:
    best_polygon: Polygon
    dev_value: float
    mode: str
    vertex_signed_distances: list
    starts: int
    converged: bool
    trace: list = field(repr=False)
    best_start: int = 0

    @property
    def n_vertices(self) -> int:
        return self.best_polygon.n


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) so draws are identical across platforms."""
    return np.random.Generator(np.random.Philox(seed))


def _check_args(k: ConvexDisc, n: int):
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise UsageError(f"n must be an integer >= 3, got {n!r}")
    if isinstance(k, PolygonDisc):
        raise UsageError("approximation targets circles and smooth discs")


def _collapse(g: Geometry, pts: np.ndarray) -> np.ndarray:
    """Drop vertices coinciding with their predecessor (at most n vertices)."""
    keep = [pts[0]]
    for p in pts[1:]:
        if raw_distance(g, keep[-1], p) > COLLAPSE_TOL:
            keep.append(p)
    if len(keep) > 1 and raw_distance(g, keep[-1], keep[0]) <= COLLAPSE_TOL:
        keep.pop()
    return np.array(keep)


def _report(k: ConvexDisc, pts, mode, starts, converged, trace, best_start) -> ApproxReport:
    poly = Polygon(k.geometry, _collapse(k.geometry, np.asarray(pts)))
    res = deviation.dev(k, poly)
    sd = [float(k.signed_distance(v)) for v in poly.vertices]
    return ApproxReport(poly, res.dev, mode, sd, starts, converged, list(trace), best_start)


# -- inscribed --------------------------------------------------------------

def _ascend(k: ConvexDisc, ts: np.ndarray, tol: float, gss_tol: float, max_sweeps: int):
    """Cyclic coordinate ascent of the inscribed perimeter."""
    g = k.geometry
    period = k.period
    n = len(ts)
    ts = np.sort(np.mod(ts, period))
    pts = [k.boundary_point(t) for t in ts]

    def perim():
        return math.fsum(raw_distance(g, pts[i], pts[(i + 1) % n]) for i in range(n))

    trace = [perim()]
    converged = False
    for _ in range(max_sweeps):
        for i in range(n):
            prev_t = ts[i - 1] if i > 0 else ts[-1] - period
            next_t = ts[i + 1] if i < n - 1 else ts[0] + period
            a, b = pts[i - 1], pts[(i + 1) % n]

            def local(t):
                x = k.boundary_point(t)
                return raw_distance(g, a, x) + raw_distance(g, x, b)

            current = local(ts[i])
            t_new, val = golden_section(local, prev_t, next_t, tol=gss_tol, maximize=True)
            if val > current:
                ts[i] = t_new
                pts[i] = k.boundary_point(t_new)
        # keep parameters in [0, period) and cyclically sorted
        order = np.argsort(np.mod(ts, period), kind="stable")
        ts = np.mod(ts, period)[order]
        pts = [pts[j] for j in order]
        trace.append(max(perim(), trace[-1]))
        if trace[-1] - trace[-2] < tol:
            converged = True
            break
    return ts, pts, trace, converged


def best_inscribed(k: ConvexDisc, n: int, seed: int = 0, tol: float = 1e-12,
                   starts: int = INSCRIBED_STARTS, gss_tol: float = 1e-12,
                   max_sweeps: int = 20000) -> ApproxReport:
    """Maximum-perimeter inscribed n-gon.

    Start 0 spaces the boundary parameters evenly; the others draw them
    uniformly from a Philox stream seeded with ``seed``.
    """
    _check_args(k, n)
    rng = make_rng(seed)
    best = None
    for s in range(starts):
        if s == 0:
            ts0 = k.period * np.arange(n) / n
        else:
            ts0 = np.sort(rng.uniform(0.0, k.period, n))
        ts, pts, trace, conv = _ascend(k, ts0, tol, gss_tol, max_sweeps)
        if best is None or trace[-1] > best[2][-1]:
            best = (s, pts, trace, conv)
    s, pts, trace, conv = best
    return _report(k, pts, "inscribed", starts, conv, trace, s)


# -- free -------------------------------------------------------------------

@dataclass
class _FreeProblem:
    """Vertex i sits at signed normal offset ``x[2i+1]`` from the boundary
    point with parameter ``x[2i]``: an unconstrained chart covering every
    polygon near ``K`` in which the inscribed set is ``{offsets == 0}``."""

    k: ConvexDisc
    n: int

    def decode(self, x):
        u = np.reshape(x, (self.n, 2))
        return self.k.normal_points(u[:, 0], u[:, 1])

    def objective(self, x) -> float:
        if not np.all(np.isfinite(x)):
            return math.inf
        u = np.reshape(x, (self.n, 2))
        if isinstance(self.k, Circle):
            # closed form in the circle's frame, ~10x faster than the general engine
            try:
                return deviation.circle_dev(
                    self.k, self.k.local_normal_points(u[:, 0], u[:, 1]), local=True)
            except (DiscError, ValueError):
                return math.inf
        g = self.k.geometry
        try:
            poly = Polygon(g, self.decode(x))
        except (DiscError, ValueError):
            return math.inf
        return deviation.dev(self.k, poly, ordered=False).dev


def _nelder_mead(problem: _FreeProblem, x0, tol: float, max_restarts: int, maxfev: int):
    trace = [problem.objective(x0)]
    x, fx = np.asarray(x0, dtype=float), trace[0]
    success = False
    scale = 0.05
    # many short runs from fresh axis-aligned simplices beat a few long ones:
    # a degenerate simplex is discarded before it stalls
    for _ in range(max_restarts + 1):
        sim = [x] + [x + scale * e for e in np.eye(len(x))]

        def cb(intermediate_result):
            trace.append(min(float(intermediate_result.fun), trace[-1]))

        # inf - inf in scipy's convergence test while the simplex straddles invalid polygons
        with np.errstate(invalid="ignore"):
            res = optimize.minimize(
                problem.objective, x, method="Nelder-Mead", callback=cb,
                options={"initial_simplex": np.array(sim), "xatol": XATOL, "fatol": tol,
                         "maxfev": maxfev},
            )
        improved = fx - res.fun if math.isfinite(res.fun) else 0.0
        if res.fun < fx:
            x, fx = res.x, float(res.fun)
        success = bool(res.success)
        scale = max(scale * 0.3, 1e-5)
        if not improved > tol:
            break
    return x, fx, trace, success


def _free_start(args):
    problem, x0, tol, max_restarts, maxfev = args
    return _nelder_mead(problem, x0, tol, max_restarts, maxfev)


def _start_points(k: ConvexDisc, n: int, inscribed_ts, starts: int, rng: np.random.Generator):
    x_ins = np.column_stack([inscribed_ts, np.zeros(n)]).ravel()
    step = k.period / n
    out = [x_ins]
    for s in range(1, starts):
        if s % 2 == 1:
            noise = rng.normal(0.0, 1.0, (n, 2)) * [0.1 * step, 0.05]
            out.append(x_ins + noise.ravel())
        else:
            ts = np.sort(rng.uniform(0.0, k.period, n))
            out.append(np.column_stack([ts, np.zeros(n)]).ravel())
    return out


def default_workers() -> int:
    env = os.environ.get("CDK_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def best_free(k: ConvexDisc, n: int, seed: int = 0, tol: float = 1e-12,
              starts: int = FREE_STARTS, workers: int = 1, max_restarts: int = 12,
              maxfev: Optional[int] = None,
              inscribed: Optional[ApproxReport] = None) -> ApproxReport:
    """Minimise ``dev`` over unconstrained vertex positions.

    Each vertex is a boundary parameter plus a signed offset along the
    boundary normal; non-convex or mis-oriented candidates score ``+inf``.  Starts are
    the inscribed optimum, Gaussian perturbations of it, and random inscribed
    polygons; each runs Nelder-Mead with restarts.  The reduction keeps the
    lowest ``dev``, ties going to the lowest start index, so results do not
    depend on ``workers``.
    """
    _check_args(k, n)
    if inscribed is None:
        inscribed = best_inscribed(k, n, seed=seed)
    rng = make_rng(seed + 1)
    problem = _FreeProblem(k, n)
    ins_pts = inscribed.best_polygon.vertices
    if len(ins_pts) < n:
        raise UsageError("inscribed optimum collapsed below n vertices")
    ins_ts = np.array([k.param_of(p) for p in ins_pts])
    x0s = _start_points(k, n, ins_ts, starts, rng)
    maxfev = maxfev or 300 * n
    jobs = [(problem, x0, tol, max_restarts, maxfev) for x0 in x0s]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_free_start, jobs))
    else:
        results = [_free_start(j) for j in jobs]
    best_i = min(range(len(results)), key=lambda i: (results[i][1], i))
    x, fx, trace, success = results[best_i]
    return _report(k, problem.decode(x), "free", starts, success, trace, best_i)


# -- Dowker-type tables -----------------------------------------------------

@dataclass
class DowkerRow:
    n: int
    p_inscribed: float
    delta: float
    d2_p: Optional[float]
    d2_delta: Optional[float]


def second_differences(values) -> list:
    v = list(values)
    return [None] + [v[i - 1] - 2.0 * v[i] + v[i + 1] for i in range(1, len(v) - 1)] + [None]


def dowker_table(k: ConvexDisc, n_min: int = 3, n_max: int = 8, seed: int = 0,
                 starts: int = INSCRIBED_STARTS) -> list[DowkerRow]:
    """Maximum inscribed perimeter ``p(n)`` and ``delta(n) = per K - p(n)``.

    ``delta`` equals the minimum deviation only where the optimum is known
    to be inscribed, so spherical discs are rejected.  Both second
    differences are reported; no sign is asserted here.
    """
    if not (3 <= n_min < n_max <= 12):
        raise UsageError("need 3 <= n_min < n_max <= 12")
    if k.geometry is Geometry.SPHERICAL:
        raise UsageError("inscribed reduction of delta(n) holds only for curvature <= 0")
    per_k = k.perimeter()
    ps = []
    for n in range(n_min, n_max + 1):
        rep = best_inscribed(k, n, seed=seed, starts=starts)
        p = rep.best_polygon.perimeter()
        ps.append(max(p, ps[-1]) if ps else p)
    deltas = [per_k - p for p in ps]
    d2p, d2d = second_differences(ps), second_differences(deltas)
    return [DowkerRow(n, p, d, a, b)
            for n, p, d, a, b in zip(range(n_min, n_max + 1), ps, deltas, d2p, d2d)]
