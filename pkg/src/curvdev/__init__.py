"""Perimeter deviation between convex discs and convex polygons in the
Euclidean plane, the hyperbolic plane (Klein model) and the sphere."""

from .geom_core import Geometry, Isometry, distance
from .discs import Circle, KleinSmooth, Polygon, PolygonDisc, regular_polygon
from .deviation import dev, sampled_dev
from .approximator import best_free, best_inscribed, dowker_table

__all__ = [
    "Geometry", "Isometry", "distance",
    "Circle", "KleinSmooth", "Polygon", "PolygonDisc", "regular_polygon",
    "dev", "sampled_dev",
    "best_free", "best_inscribed", "dowker_table",
]

__version__ = "0.1.0"
