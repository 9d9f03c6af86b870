"""One-dimensional bracketing searches."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol=1e-12, maximize=False, max_iter=200):
    """Golden-section search for an extremum of a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` for the best point evaluated, endpoints included.
    """
    sign = -1.0 if maximize else 1.0

    def g(x):
        return sign * f(x)

    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = g(c), g(d)
    it = 0
    while b - a > tol and it < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = g(d)
        it += 1
    x, fx = (c, fc) if fc <= fd else (d, fd)
    for e in (lo, hi):
        fe = g(e)
        if fe < fx:
            x, fx = e, fe
    return x, sign * fx
