import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvdev import deviation
from curvdev.discs import Circle, DiscError, KleinSmooth, Polygon, PolygonDisc, regular_polygon
from curvdev.geom_core import Geometry, rotation, translation_to

from oracles import circle_perimeter, discrete_dev, random_convex_polygon

E, H, S = Geometry.EUCLIDEAN, Geometry.HYPERBOLIC, Geometry.SPHERICAL
ALL = [E, H, S]
RADIUS = {E: 1.0, H: 1.0, S: 1.0}


def polygons(g, count, seed):
    rng = np.random.default_rng(seed)
    return [random_convex_polygon(g, rng) for _ in range(count)]


@pytest.mark.parametrize("g", ALL)
def test_identity_and_decomposition(g):
    k = Circle(g, None, RADIUS[g])
    for v in polygons(g, 25, 11):
        res = deviation.dev(k, Polygon(g, v))
        assert res.dev == pytest.approx(res.per_K + res.per_P - 2 * res.per_intersection, abs=1e-12)
        assert math.fsum(pc.length for pc in res.decomposition) == pytest.approx(
            res.per_intersection, abs=1e-12)
        assert res.per_union - res.per_intersection == pytest.approx(res.dev, abs=1e-12)
        assert res.per_K == pytest.approx(circle_perimeter(g, RADIUS[g]), rel=1e-13)
        assert res.crossing_count % 2 == 0
        assert res.dev >= -1e-12


@pytest.mark.parametrize("g", ALL)
def test_against_discretised_boundaries(g):
    k = Circle(g, None, RADIUS[g])
    for v in polygons(g, 5, 12):
        got = deviation.dev(k, Polygon(g, v)).dev
        assert got == pytest.approx(discrete_dev(g, RADIUS[g], v, m=600_000), abs=1e-4)


@pytest.mark.parametrize("g", ALL)
def test_inscribed_polygon(g):
    k = Circle(g, None, 0.9)
    p = Polygon(g, k.boundary_points(np.array([0.1, 1.7, 2.5, 4.0, 5.2])))
    res = deviation.dev(k, p)
    assert res.dev == pytest.approx(k.perimeter() - p.perimeter(), abs=1e-12)


@pytest.mark.parametrize("g", ALL)
def test_polygon_containing_disc(g):
    k = Circle(g, None, 0.5)
    p = regular_polygon(g, 6, 0.9)
    assert deviation.dev(k, p).dev == pytest.approx(p.perimeter() - k.perimeter(), abs=1e-12)


@pytest.mark.parametrize("g", ALL)
def test_disjoint(g):
    k = Circle(g, None, 0.3)
    centre = Circle(g, None, 1.0).boundary_point(0.5)
    p = regular_polygon(g, 4, 0.2, center=centre)
    res = deviation.dev(k, p)
    assert res.dev == pytest.approx(k.perimeter() + p.perimeter(), abs=1e-12)
    assert res.per_intersection == 0.0


def test_euclidean_triangle_closed_form():
    k = Circle(E, None, 1.0)
    assert deviation.dev(k, regular_polygon(E, 3, 1.0)).dev == pytest.approx(
        2 * math.pi - 3 * math.sqrt(3), abs=1e-12)


@pytest.mark.parametrize("g", ALL)
def test_perspectives_agree(g):
    k = Circle(g, [0.1, 0.05] if g is not S else None, RADIUS[g])
    for v in polygons(g, 8, 13):
        p = Polygon(g, v)
        a = deviation.dev(k, p, perspective="polygon").dev
        b = deviation.dev(k, p, perspective="disc").dev
        assert a == pytest.approx(b, abs=1e-9)


def test_bad_perspective():
    with pytest.raises(ValueError):
        deviation.dev(Circle(E, None, 1.0), regular_polygon(E, 3, 1.0), perspective="both")


@pytest.mark.parametrize("g", ALL)
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), t=st.floats(0, 2 * math.pi), phi=st.floats(0, 2 * math.pi),
       a=st.floats(0.0, 0.6))
def test_isometry_invariance(g, seed, t, phi, a):
    v = random_convex_polygon(g, np.random.default_rng(seed))
    k = Circle(g, None, RADIUS[g])
    base = deviation.dev(k, Polygon(g, v)).dev
    target = Circle(g, None, a).boundary_point(t) if a > 0 else k.center
    m = rotation(g, phi) @ translation_to(g, target)
    moved = deviation.dev(Circle(g, m(k.center), RADIUS[g]), Polygon(g, m.apply_many(v))).dev
    assert moved == pytest.approx(base, abs=1e-8)


@pytest.mark.parametrize("g", ALL)
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_circle_fast_path_matches_engine(g, seed):
    v = random_convex_polygon(g, np.random.default_rng(seed))
    centre = {E: [0.2, -0.1], H: [0.1, 0.2], S: [0.1, 0.1, math.sqrt(0.98)]}[g]
    k = Circle(g, centre, RADIUS[g])
    assert deviation.circle_dev(k, v) == pytest.approx(deviation.dev(k, Polygon(g, v)).dev, abs=1e-10)


def test_fast_path_rejects_what_polygon_rejects():
    k = Circle(E, None, 1.0)
    with pytest.raises(DiscError):
        deviation.circle_dev(k, [[0, 0], [0, 1], [1, 0]])
    with pytest.raises(DiscError):
        deviation.circle_dev(k, [[0, 0], [1, 0]])
    with pytest.raises(DiscError):
        deviation.circle_dev(Circle(H, None, 1.0), [[0, 0], [1.2, 0], [0, 0.5]])


def test_symmetric_in_the_two_bodies():
    a = Polygon(E, [[0, 0], [2, 0], [2, 1], [0, 1]])
    b = regular_polygon(E, 5, 0.8, center=[1.8, 0.9])
    assert deviation.dev(PolygonDisc(a), b).dev == pytest.approx(
        deviation.dev(PolygonDisc(b), a).dev, abs=1e-10)


def test_klein_smooth_inscribed():
    k = KleinSmooth(0.5, [0.0, 0.1])
    p = Polygon(H, np.array([k.boundary_point(t) for t in (0.2, 1.9, 3.4, 4.9)]))
    assert deviation.dev(k, p).dev == pytest.approx(k.perimeter() - p.perimeter(), abs=1e-10)


@pytest.mark.parametrize("g", ALL)
def test_sampled_estimate(g):
    k = Circle(g, None, RADIUS[g])
    v = polygons(g, 1, 14)[0]
    p = Polygon(g, v)
    est = deviation.sampled_dev(k, p, count=400_000, rng=np.random.default_rng(0))
    assert est == pytest.approx(deviation.dev(k, p).dev, abs=2e-4)


def test_geometry_mismatch():
    with pytest.raises(ValueError):
        deviation.dev(Circle(E, None, 1.0), regular_polygon(H, 3, 0.5))
