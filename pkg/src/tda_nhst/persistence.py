"""Persistent homology over Z/2 by boundary-matrix reduction.

Columns are stored as Python integers used as bitsets over the filtration
order, so adding two columns is a single XOR and the pivot (lowest one) is
``bit_length() - 1``.
"""

import numpy as np
from scipy.spatial.distance import pdist

from ._validation import check_point_cloud
from .diagrams import PersistenceDiagram
from .filtrations import rips_filtration

__all__ = ["compute_persistence", "zero_dim_persistence", "rips_persistence", "UnionFind"]


def _filtration_order(fc):
    dims = fc.dimensions()
    return np.lexsort((np.arange(len(fc)), dims, fc.values)), dims


def compute_persistence(fc, max_hom_dim=1):
    """Persistence diagrams of a filtered complex in degrees ``0..max_hom_dim``.

    Simplices are ordered by (filtration value, dimension, insertion
    index). The boundary matrix is reduced from the top dimension down,
    clearing columns already known to be positive. Classes that are never
    killed get death ``inf``; zero-persistence pairs are dropped.

    Parameters
    ----------
    fc : FilteredComplex
        Must be closed under faces with monotone values. Simplices above
        dimension ``max_hom_dim + 1`` are ignored.
    max_hom_dim : int, default=1

    Returns
    -------
    list of PersistenceDiagram
        One diagram per degree, index ``k`` holding degree ``k``.
    """
    if max_hom_dim < 0:
        raise ValueError("max_hom_dim must be >= 0")
    fc.validate()
    if fc.dimension > max_hom_dim + 1:
        fc = fc.skeleton(max_hom_dim + 1)
    order, dims = _filtration_order(fc)
    pos = np.empty(len(fc), dtype=np.int64)
    pos[order] = np.arange(len(fc))
    pos_of = {s: int(pos[i]) for i, s in enumerate(fc.simplices)}
    values = fc.values[order]
    dims = dims[order]
    simplices = [fc.simplices[i] for i in order]

    pivot_col = {}  # low row -> reduced column (bitset)
    death_of = {}   # positive simplex position -> killing simplex position
    cleared = set()
    top = int(dims.max()) if len(dims) else -1
    for dim in range(top, 0, -1):
        for j in np.flatnonzero(dims == dim):
            j = int(j)
            if j in cleared:
                continue
            s = simplices[j]
            col = 0
            for k in range(len(s)):
                col ^= 1 << pos_of[s[:k] + s[k + 1:]]
            while col:
                low = col.bit_length() - 1
                other = pivot_col.get(low)
                if other is None:
                    break
                col ^= other
            if col:
                low = col.bit_length() - 1
                pivot_col[low] = col
                death_of[low] = j
                cleared.add(low)

    pairs = [[] for _ in range(max_hom_dim + 1)]
    negative = set(death_of.values())
    for i in range(len(simplices)):
        d = int(dims[i])
        if d > max_hom_dim or i in negative:
            continue
        if i in death_of:
            pairs[d].append((values[i], values[death_of[i]]))
        else:
            # zero reduced column, never killed: essential class
            pairs[d].append((values[i], np.inf))
    return [PersistenceDiagram(p, k) for k, p in enumerate(pairs)]


class UnionFind:
    """Disjoint sets with path halving, tracking each root's birth value."""

    def __init__(self, births):
        self.parent = list(range(len(births)))
        self.birth = list(births)

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        """Merge the sets of ``a`` and ``b``; return the dying birth or None.

        The younger root (larger birth, ties broken by larger index) is
        absorbed by the elder.
        """
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        if (self.birth[ra], ra) > (self.birth[rb], rb):
            ra, rb = rb, ra
        self.parent[rb] = ra
        return self.birth[rb]


def zero_dim_persistence(edges, n_vertices, vertex_values=None):
    """Degree-0 persistence of a graph filtration by union-find.

    Edges are processed by increasing value; when an edge joins two
    components the one born later dies at the edge value (elder rule).

    Parameters
    ----------
    edges : iterable of (int, int, float)
        Each edge value must be at least the values of its endpoints.
    n_vertices : int
    vertex_values : array-like of float, optional
        Vertex births; zeros by default.

    Returns
    -------
    PersistenceDiagram
        Degree 0, one essential point per connected component.
    """
    if vertex_values is None:
        vertex_values = np.zeros(n_vertices)
    vertex_values = np.asarray(vertex_values, dtype=float)
    if vertex_values.shape != (n_vertices,):
        raise ValueError("vertex_values must have length n_vertices")
    edges = list(edges)
    uf = UnionFind(vertex_values.tolist())
    points = []
    if edges:
        e = np.asarray(edges, dtype=float).reshape(-1, 3)
        ii, jj, vals = e[:, 0].astype(int), e[:, 1].astype(int), e[:, 2]
        if (vals < np.maximum(vertex_values[ii], vertex_values[jj])).any():
            raise ValueError("edge value below one of its endpoint values")
        for k in np.argsort(vals, kind="stable"):
            born = uf.union(int(ii[k]), int(jj[k]))
            if born is not None:
                points.append((born, vals[k]))
    roots = {uf.find(i) for i in range(n_vertices)}
    points.extend((uf.birth[r], np.inf) for r in sorted(roots))
    return PersistenceDiagram(points, 0)


def rips_persistence(points, max_hom_dim=1, max_radius=None):
    """Rips persistence diagrams of a point cloud in degrees ``0..max_hom_dim``.

    Degree 0 alone is computed from the edge list by union-find, skipping
    the boundary matrix.
    """
    pts = check_point_cloud(points)
    if max_hom_dim == 0:
        n = len(pts)
        dist = pdist(pts)
        ii, jj = np.triu_indices(n, k=1)
        keep = slice(None) if max_radius is None else dist <= max_radius
        edges = np.column_stack([ii[keep], jj[keep], dist[keep]])
        return [zero_dim_persistence(edges, n)]
    fc = rips_filtration(pts, max_dim=max_hom_dim + 1, max_radius=max_radius)
    return compute_persistence(fc, max_hom_dim)
