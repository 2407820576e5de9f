"""Persistent homology transform of planar polygons (degree 0)."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_polygon
from .diagrams import PersistenceDiagram
from .filtrations import height_filtration
from .matching import InfinitePolicy, diagram_distance
from .persistence import zero_dim_persistence

__all__ = ["PHTRepresentation", "circle_directions", "normalize_polygon", "pht", "pht_distance"]


@dataclass(frozen=True)
class PHTRepresentation:
    """Degree-0 diagrams of a shape, one per direction."""

    directions: np.ndarray
    diagrams: tuple

    def __post_init__(self):
        if len(self.directions) != len(self.diagrams):
            raise ValueError("need exactly one diagram per direction")

    def __len__(self):
        return len(self.diagrams)


def circle_directions(n_directions):
    """``n_directions`` unit vectors evenly spaced on the circle, starting at (1, 0)."""
    if n_directions < 1:
        raise ValueError("n_directions must be >= 1")
    theta = 2.0 * np.pi * np.arange(n_directions) / n_directions
    return np.column_stack([np.cos(theta), np.sin(theta)])


def normalize_polygon(polygon):
    """Translate the vertex centroid to the origin and scale the largest vertex norm to 1."""
    poly = check_polygon(polygon)
    centered = poly - poly.mean(axis=0)
    return centered / np.linalg.norm(centered, axis=1).max()


def _direction_diagram(polygon, direction):
    fc = height_filtration(polygon, direction)
    n = len(polygon)
    heights = fc.values[:n]
    edges = [(s[0], s[1], v) for s, v in zip(fc.simplices[n:], fc.values[n:])]
    dgm = zero_dim_persistence(edges, n, heights)
    top = float(heights.max())
    return PersistenceDiagram(InfinitePolicy("truncate", top).apply(dgm), 0)


def pht(polygon, n_directions=64, normalize=False):
    """Degree-0 persistent homology transform of a closed polygon.

    For each direction the polygon is filtered by height; the one essential
    class is truncated at the direction's maximum height so that every
    diagram is finite.

    Parameters
    ----------
    polygon : array-like of shape (n_vertices, 2)
    n_directions : int, default=64
    normalize : bool, default=False
        Center on the vertex centroid and scale to unit maximum vertex norm
        before filtering.

    Returns
    -------
    PHTRepresentation
    """
    poly = normalize_polygon(polygon) if normalize else check_polygon(polygon)
    directions = circle_directions(n_directions)
    directions.setflags(write=False)
    diagrams = tuple(_direction_diagram(poly, v) for v in directions)
    return PHTRepresentation(directions, diagrams)


def pht_distance(a, b):
    """Riemann-sum L2 distance between two transforms on the same directions.

    ``sqrt((2*pi/n) * sum_k d(a_k, b_k)**2)``.
    """
    if a.directions.shape != b.directions.shape or not np.array_equal(a.directions, b.directions):
        raise ValueError("transforms were computed on different direction sets")
    n = len(a)
    total = sum(diagram_distance(x, y) ** 2 for x, y in zip(a.diagrams, b.diagrams))
    return math.sqrt(2.0 * math.pi / n * total)
