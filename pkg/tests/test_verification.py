import math

import numpy as np
import pytest

from curvdev import verification as V
from curvdev.discs import Circle, KleinSmooth, PolygonDisc, regular_polygon
from curvdev.geom_core import Geometry, origin

E, H, S = Geometry.EUCLIDEAN, Geometry.HYPERBOLIC, Geometry.SPHERICAL


def coth(x):
    return 1.0 / math.tanh(x)


def test_normalized_position():
    k = Circle(H, [0.2, -0.3], 0.9)
    nd = V.prepare(k, t=1.3)
    d = nd.disc
    assert np.allclose(d.boundary_point(1.3), origin(H), atol=1e-12)
    tangent = d.boundary_derivative(1.3)
    assert abs(tangent[1]) < 1e-10 and tangent[0] > 0
    # the disc lies above the tangent line
    assert d.interior_point()[1] > 0
    assert nd.kappa == pytest.approx(coth(0.9), rel=1e-9)


def test_euclidean_arc_probe_closed_form():
    # circle of radius R tangent to the x-axis: arc to abscissa x is R asin(x / R)
    radius = 2.0
    rep = V.arc_coefficient_fit(Circle(E, [0.3, 0.1], radius), t=0.7)
    for pr in rep.probes:
        assert pr.s == pytest.approx(radius * math.asin(pr.param / radius), rel=1e-12)
    assert rep.coefficient == pytest.approx(1 / (6 * radius ** 2), rel=1e-4)
    assert rep.exponent == pytest.approx(3.0, abs=1e-3)


def test_euclidean_oblique_probe_closed_form():
    # chord at angle theta from a point of a circle: arc 2 R theta, chord 2 R sin theta
    radius = 2.0
    rep = V.oblique_defect_fit(Circle(E, None, radius))
    for pr in rep.probes:
        assert pr.s == pytest.approx(2 * radius * pr.param, rel=1e-8)
        assert pr.s_l == pytest.approx(2 * radius * math.sin(pr.param), rel=1e-8)
    assert V.crossing_ratio(rep) == pytest.approx(2 * radius, rel=1e-6)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_hyperbolic_arc_coefficient(rho):
    rep = V.arc_coefficient_fit(Circle(H, None, rho))
    assert rep.expected == pytest.approx((coth(rho) ** 2 + 2) / 6, rel=1e-12)
    assert rep.relative_error < 1e-4
    assert rep.exponent == pytest.approx(3.0, abs=1e-2)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_hyperbolic_parallel_defect(rho):
    rep = V.parallel_defect_fit(Circle(H, None, rho))
    assert rep.exponent == pytest.approx(1.5, abs=1e-3)
    assert rep.expected == pytest.approx(2 * math.sqrt(2) / 3 * math.sqrt(coth(rho)), rel=1e-12)
    assert rep.relative_error < 1e-3
    for pr in rep.probes:
        assert pr.x_minus == pytest.approx(-pr.x_plus, abs=1e-9)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_hyperbolic_oblique_defect(rho):
    rep = V.oblique_defect_fit(Circle(H, None, rho))
    assert rep.exponent == pytest.approx(3.0, abs=1e-2)
    assert rep.relative_error < 1e-3
    assert V.crossing_ratio(rep) == pytest.approx(2 / coth(rho), rel=1e-3)


def test_smooth_disc_uses_local_curvature():
    k = KleinSmooth(0.5, [0.0, 0.1])
    for fit, tol in ((V.arc_coefficient_fit, 2e-3), (V.parallel_defect_fit, 1e-3),
                     (V.oblique_defect_fit, 5e-3)):
        rep = fit(k, t=0.9)
        assert rep.kappa == pytest.approx(k.geodesic_curvature(k.boundary_point(0.9)), rel=1e-9)
        assert rep.relative_error < tol


def test_sphere_and_polygons_rejected():
    with pytest.raises(V.VerificationError):
        V.arc_coefficient_fit(Circle(S, None, 1.0))
    with pytest.raises(V.VerificationError):
        V.prepare(PolygonDisc(regular_polygon(E, 4, 1.0)))


def test_grid_validation():
    k = Circle(H, None, 1.0)
    with pytest.raises(V.VerificationError):
        V.arc_coefficient_fit(k, grid=[0.01, 0.02])
    with pytest.raises(V.VerificationError):
        V.arc_coefficient_fit(k, grid=[0.01, 0.02, 0.03, 0.04, 0.05, 0.5])
    with pytest.raises(V.VerificationError):
        V.parallel_defect_fit(k, grid=np.geomspace(1e-6, 1e-3, 8))
    rep = V.oblique_defect_fit(k, grid=np.geomspace(1e-3, 4e-2, 7))
    assert len(rep.probes) == 7
    assert rep.grid == tuple(sorted(rep.grid, reverse=True))


def test_expansion_rows():
    rep = V.arc_coefficient_fit(Circle(H, None, 1.0))
    rows = V.expansion_rows(rep)
    assert len(rows) == len(rep.grid)
    param, s, s_l, defect, running = rows[-1]
    assert defect == pytest.approx(s - s_l)
    assert running == pytest.approx(defect / param ** 3)


def test_degenerate_probes():
    nd = V.prepare(Circle(H, None, 1.0))
    assert V.parallel_probe(nd, 0.0).defect == 0.0
    assert V.oblique_probe(nd, 0.0).defect == 0.0
