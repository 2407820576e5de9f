"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np

from .diagrams import PersistenceDiagram


def check_point_cloud(points):
    """Return ``points`` as a float array of shape (n_points, n_features)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 1)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError(f"point cloud must have shape (n_points, n_features), got {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError("point cloud contains NaN")
    if not np.isfinite(arr).all():
        raise ValueError("point cloud contains infinite coordinates")
    return arr


def check_polygon(vertices):
    """Return polygon vertices as a float array of shape (n_vertices, 2)."""
    arr = np.asarray(vertices, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"polygon must have shape (n_vertices, 2), got {arr.shape}")
    if len(arr) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    if not np.isfinite(arr).all():
        raise ValueError("polygon coordinates must be finite")
    if (np.roll(arr, -1, axis=0) == arr).all(axis=1).any():
        raise ValueError("consecutive polygon vertices must be distinct")
    return arr


def check_diagrams(diagrams):
    """Return a list of diagrams sharing one homology degree."""
    diagrams = list(diagrams)
    for d in diagrams:
        if not isinstance(d, PersistenceDiagram):
            raise TypeError(f"expected PersistenceDiagram, got {type(d).__name__}")
    dims = {d.hom_dim for d in diagrams}
    if len(dims) > 1:
        raise ValueError(f"diagrams span several homology degrees: {sorted(dims)}")
    return diagrams


def check_distance_matrix(d, atol=0.0):
    """Validate a square, symmetric, nonnegative matrix with zero diagonal."""
    arr = np.asarray(d, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("distance matrix must be finite")
    if (arr < 0).any():
        raise ValueError("distance matrix must be nonnegative")
    if np.abs(np.diag(arr)).max(initial=0.0) > atol:
        raise ValueError("distance matrix must have a zero diagonal")
    if np.abs(arr - arr.T).max(initial=0.0) > atol:
        raise ValueError("distance matrix must be symmetric")
    return arr
