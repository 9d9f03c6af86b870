import math

import numpy as np
import pytest

from curvdev import approximator as ap
from curvdev.discs import Circle, KleinSmooth, Polygon
from curvdev.geom_core import Geometry

from oracles import mp_f

E, H, S = Geometry.EUCLIDEAN, Geometry.HYPERBOLIC, Geometry.SPHERICAL


def regular_inscribed_dev(g, r, n):
    """Deviation of the regular n-gon inscribed in a circle of radius r."""
    if g is E:
        return 2 * math.pi * r - 2 * n * r * math.sin(math.pi / n)
    if g is H:
        return 2 * math.pi * math.sinh(r) - 2 * n * math.asinh(math.sinh(r) * math.sin(math.pi / n))
    return 2 * math.pi * math.sin(r) - 2 * n * math.asin(math.sin(r) * math.sin(math.pi / n))


@pytest.mark.parametrize("g,r", [(E, 1.0), (H, 1.0), (H, 0.4), (S, 0.8)])
@pytest.mark.parametrize("n", [3, 4, 7])
def test_inscribed_circle_is_regular(g, r, n):
    rep = ap.best_inscribed(Circle(g, None, r), n, seed=1)
    assert rep.dev_value == pytest.approx(regular_inscribed_dev(g, r, n), abs=1e-9)
    assert max(abs(x) for x in rep.vertex_signed_distances) < 1e-12
    assert rep.mode == "inscribed"
    assert rep.n_vertices == n


def test_euclidean_square():
    rep = ap.best_inscribed(Circle(E, None, 1.0), 4)
    assert rep.dev_value == pytest.approx(2 * math.pi - 4 * math.sqrt(2), abs=1e-10)


def test_spherical_inscribed_triangle_matches_trigonometry():
    r = math.pi / 2 - 0.1
    rep = ap.best_inscribed(Circle(S, None, r), 3)
    assert rep.dev_value == pytest.approx(float(mp_f(r, r)), abs=1e-9)


def test_ellipse_inscribed_beats_random_inscribed():
    k = KleinSmooth(0.5, [0.0, 0.1])
    rep = ap.best_inscribed(k, 4, seed=3)
    best_p = rep.best_polygon.perimeter()
    rng = np.random.default_rng(0)
    for _ in range(300):
        ts = np.sort(rng.uniform(0, 2 * math.pi, 4))
        try:
            p = Polygon(H, k.boundary_points(ts))
        except ValueError:
            continue
        assert p.perimeter() <= best_p + 1e-12
    # stationary: nudging any vertex along the boundary cannot help
    ts = np.array([k.param_of(v) for v in rep.best_polygon.vertices])
    for i in range(4):
        for h in (-1e-3, 1e-3):
            tt = ts.copy()
            tt[i] += h
            assert Polygon(H, k.boundary_points(tt)).perimeter() <= best_p + 1e-12


def test_inscribed_is_deterministic():
    k = KleinSmooth(0.5, [0.0, 0.1])
    a = ap.best_inscribed(k, 5, seed=42)
    b = ap.best_inscribed(k, 5, seed=42)
    assert np.array_equal(a.best_polygon.vertices, b.best_polygon.vertices)
    assert a.dev_value == b.dev_value


def test_free_euclidean_triangle_is_inscribed():
    k = Circle(E, None, 1.0)
    rep = ap.best_free(k, 3, starts=3)
    assert rep.dev_value == pytest.approx(2 * math.pi - 3 * math.sqrt(3), abs=1e-8)
    assert max(abs(x) for x in rep.vertex_signed_distances) < 1e-5
    assert rep.mode == "free"
    # the trace never increases
    assert all(b <= a for a, b in zip(rep.trace, rep.trace[1:]))


def test_free_on_smooth_disc_uses_general_engine():
    k = KleinSmooth(0.5, [0.0, 0.1])
    ins = ap.best_inscribed(k, 3)
    rep = ap.best_free(k, 3, starts=1, inscribed=ins)
    assert rep.dev_value <= ins.dev_value + 1e-12


def test_free_objective_rejects_invalid():
    prob = ap._FreeProblem(Circle(E, None, 1.0), 3)
    # clockwise order
    assert prob.objective(np.array([0.0, 0.0, 4.0, 0.0, 2.0, 0.0])) == math.inf
    assert prob.objective(np.array([0.0, np.nan, 2.0, 0.0, 4.0, 0.0])) == math.inf
    ok = prob.objective(np.array([0.0, 0.0, 2 * math.pi / 3, 0.0, 4 * math.pi / 3, 0.0]))
    assert ok == pytest.approx(2 * math.pi - 3 * math.sqrt(3), abs=1e-12)


def test_free_workers_do_not_change_result():
    k = Circle(H, None, 0.7)
    a = ap.best_free(k, 3, starts=2, workers=1)
    b = ap.best_free(k, 3, starts=2, workers=2)
    assert a.dev_value == b.dev_value
    assert np.array_equal(a.best_polygon.vertices, b.best_polygon.vertices)


def test_usage_errors():
    with pytest.raises(ap.UsageError):
        ap.best_inscribed(Circle(E, None, 1.0), 2)
    with pytest.raises(ap.UsageError):
        ap.dowker_table(Circle(S, None, 1.0), 3, 5)
    with pytest.raises(ap.UsageError):
        ap.dowker_table(Circle(E, None, 1.0), 5, 4)


def test_second_differences():
    assert ap.second_differences([1.0, 3.0, 4.0, 4.0]) == [None, -1.0, -1.0, None]
    assert ap.second_differences([1.0, 2.0]) == [None, None]


def test_dowker_table_euclidean_closed_form():
    rows = ap.dowker_table(Circle(E, None, 1.0), 3, 7)
    ns = [row.n for row in rows]
    assert ns == [3, 4, 5, 6, 7]
    for row in rows:
        assert row.p_inscribed == pytest.approx(2 * row.n * math.sin(math.pi / row.n), abs=1e-10)
        assert row.delta == pytest.approx(2 * math.pi - row.p_inscribed, abs=1e-10)
    inner = [row.d2_p for row in rows[1:-1]]
    assert all(v is not None and v < 0 for v in inner)
    assert rows[0].d2_p is None and rows[-1].d2_p is None


def test_make_rng_is_reproducible():
    assert ap.make_rng(5).random() == ap.make_rng(5).random()


def test_default_workers(monkeypatch):
    monkeypatch.setenv("CDK_THREADS", "3")
    assert ap.default_workers() == 3
