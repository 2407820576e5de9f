"""Filtered simplicial complexes: Vietoris-Rips, concurrence, height."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ._validation import check_point_cloud, check_polygon

__all__ = [
    "ComplexTooLargeError",
    "Simplex",
    "FilteredComplex",
    "rips_filtration",
    "dichotomize",
    "concurrence_filtration",
    "height_filtration",
]

DEFAULT_SIMPLEX_BUDGET = 2_000_000


class ComplexTooLargeError(ValueError):
    """The requested complex exceeds the simplex budget."""


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    filtration_value: float

    @property
    def dimension(self):
        return len(self.vertices) - 1


class FilteredComplex:
    """Simplices with filtration values.

    Parameters
    ----------
    simplices : sequence of sequences of int
        Vertex tuples; each is sorted on construction.
    values : array-like of float
        Filtration value of each simplex, in the same order.

    Notes
    -----
    Face-closure and monotonicity are checked by :meth:`validate`, which
    :func:`~tda_nhst.persistence.compute_persistence` calls.
    """

    def __init__(self, simplices, values):
        self.simplices = [tuple(sorted(int(v) for v in s)) for s in simplices]
        self.values = np.asarray(values, dtype=float).reshape(-1)
        if len(self.simplices) != len(self.values):
            raise ValueError("simplices and values differ in length")
        if not np.isfinite(self.values).all():
            raise ValueError("filtration values must be finite")
        for s in self.simplices:
            if not s or len(set(s)) != len(s):
                raise ValueError(f"invalid simplex {s!r}")

    @classmethod
    def from_simplices(cls, simplices):
        simplices = list(simplices)
        return cls([s.vertices for s in simplices], [s.filtration_value for s in simplices])

    def __len__(self):
        return len(self.simplices)

    def __iter__(self):
        for s, v in zip(self.simplices, self.values):
            yield Simplex(s, float(v))

    def __repr__(self):
        return f"FilteredComplex(n_simplices={len(self)}, dimension={self.dimension})"

    @property
    def dimension(self):
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def dimensions(self):
        return np.fromiter((len(s) - 1 for s in self.simplices), dtype=int, count=len(self))

    def value_of(self, simplex):
        lookup = {s: i for i, s in enumerate(self.simplices)}
        return float(self.values[lookup[tuple(sorted(simplex))]])

    def skeleton(self, k):
        keep = [i for i, s in enumerate(self.simplices) if len(s) - 1 <= k]
        return FilteredComplex([self.simplices[i] for i in keep], self.values[keep])

    def index(self):
        """Map from vertex tuple to position; raises on duplicates."""
        lookup = {}
        for i, s in enumerate(self.simplices):
            if s in lookup:
                raise ValueError(f"duplicate simplex {s!r}")
            lookup[s] = i
        return lookup

    def validate(self):
        """Check face closure and monotonicity; return the position index."""
        lookup = self.index()
        values = self.values
        for i, s in enumerate(self.simplices):
            if len(s) == 1:
                continue
            for k in range(len(s)):
                face = s[:k] + s[k + 1:]
                j = lookup.get(face)
                if j is None:
                    raise ValueError(f"complex is not closed under faces: {face!r} of {s!r} missing")
                if values[j] > values[i]:
                    raise ValueError(
                        f"filtration is not monotone: face {face!r} ({values[j]!r}) "
                        f"enters after {s!r} ({values[i]!r})"
                    )
        return lookup


def _expand_cliques(adjacency, weights, max_dim, budget):
    """Flag complex of a graph; every simplex takes its maximal edge weight."""
    n = adjacency.shape[0]
    simplices = [(i,) for i in range(n)]
    values = [np.zeros(n)]
    level = np.arange(n).reshape(-1, 1)
    level_vals = np.zeros(n)
    total = n
    idx = np.arange(n)
    for _ in range(max_dim):
        if len(level) == 0:
            break
        common = adjacency[level].all(axis=1) & (idx[None, :] > level[:, -1:])
        rows, cols = np.nonzero(common)
        total += len(rows)
        if total > budget:
            raise ComplexTooLargeError(f"complex too large (more than {budget} simplices)")
        new_vals = np.maximum(level_vals[rows], weights[level[rows], cols[:, None]].max(axis=1))
        level = np.hstack([level[rows], cols[:, None]])
        level_vals = new_vals
        simplices.extend(map(tuple, level.tolist()))
        values.append(level_vals)
    return simplices, np.concatenate(values)


def rips_filtration(points, max_dim=1, max_radius=None, budget=DEFAULT_SIMPLEX_BUDGET):
    """Vietoris-Rips filtration of a point cloud.

    Vertices enter at 0, an edge at the Euclidean length between its
    endpoints (if at most ``max_radius``), and every higher simplex, up to
    dimension ``max_dim``, at the largest of its edge lengths.

    Parameters
    ----------
    points : array-like of shape (n_points, n_features)
    max_dim : int, default=1
        Largest simplex dimension to include.
    max_radius : float, optional
        Edge-length threshold. Defaults to the diameter of the cloud.
    budget : int
        Maximum number of simplices.

    Returns
    -------
    FilteredComplex
    """
    pts = check_point_cloud(points)
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    n = len(pts)
    dist = squareform(pdist(pts)) if n > 1 else np.zeros((n, n))
    if max_radius is None:
        max_radius = dist.max() if n else 0.0
    adjacency = dist <= max_radius
    np.fill_diagonal(adjacency, False)
    simplices, values = _expand_cliques(adjacency, dist, max_dim, budget)
    return FilteredComplex(simplices, values)


def dichotomize(data, cutoff):
    """Binary matrix with 1 where ``data > cutoff``."""
    return (np.asarray(data, dtype=float) > cutoff).astype(np.int8)


def concurrence_filtration(activity, max_dim=1, budget=DEFAULT_SIMPLEX_BUDGET):
    """Concurrence complex of a binary activity matrix.

    For each set of columns (variables) ``S`` with ``|S| - 1 <= max_dim``,
    ``c(S)`` counts the rows (timepoints) in which every column of ``S`` is
    active. Simplices with ``c(S) > 0`` are included at value ``-c(S)``,
    so the superlevel filtration of ``c`` becomes a sublevel filtration.

    Parameters
    ----------
    activity : array-like of shape (n_timepoints, n_variables)
        Entries in {0, 1}.
    max_dim : int, default=1
    budget : int
        Maximum number of simplices before raising
        :class:`ComplexTooLargeError`.
    """
    a = np.asarray(activity)
    if a.ndim != 2:
        raise ValueError("activity must be a 2-D matrix")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("activity entries must be 0 or 1")
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    a = a.astype(bool)
    n_vars = a.shape[1]
    simplices, values = [], []
    # Each frontier entry: (simplex, boolean row mask where all its columns are active).
    frontier = []
    for v in range(n_vars):
        count = int(a[:, v].sum())
        if count:
            frontier.append(((v,), a[:, v]))
            simplices.append((v,))
            values.append(-count)
    if len(simplices) > budget:
        raise ComplexTooLargeError(f"complex too large (more than {budget} simplices)")
    for _ in range(max_dim):
        nxt = []
        for s, mask in frontier:
            for v in range(s[-1] + 1, n_vars):
                joint = mask & a[:, v]
                count = int(joint.sum())
                if count:
                    t = s + (v,)
                    nxt.append((t, joint))
                    simplices.append(t)
                    values.append(-count)
                    if len(simplices) > budget:
                        raise ComplexTooLargeError(
                            f"complex too large (more than {budget} simplices)"
                        )
        frontier = nxt
        if not frontier:
            break
    return FilteredComplex(simplices, np.asarray(values, dtype=float))


def height_filtration(polygon, direction):
    """Lower-star filtration of a closed polygon by height along ``direction``.

    Vertex ``i`` enters at ``<x_i, direction>``; the edge joining vertices
    ``i`` and ``i + 1`` (cyclically) enters at the larger endpoint height.
    """
    poly = check_polygon(polygon)
    v = np.asarray(direction, dtype=float).reshape(-1)
    if v.shape != (2,) or abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector in the plane")
    heights = poly @ v
    n = len(poly)
    simplices = [(i,) for i in range(n)]
    simplices += [(i, (i + 1) % n) for i in range(n)]
    nxt = np.roll(heights, -1)
    values = np.concatenate([heights, np.maximum(heights, nxt)])
    return FilteredComplex(simplices, values)
