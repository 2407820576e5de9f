"""L2 matching distance between persistence diagrams.

The distance is the square root of an optimal assignment cost. Each
diagram is padded with copies of the diagonal so that every off-diagonal
point may be sent to its nearest diagonal point instead of being matched.
"""

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from ._parallel import effective_n_jobs
from .diagrams import PersistenceDiagram

__all__ = [
    "InfinitePolicy",
    "Matching",
    "build_cost_matrix",
    "hungarian_assign",
    "diagram_distance",
    "pairwise_distance_matrix",
]


@dataclass(frozen=True)
class InfinitePolicy:
    """How points with infinite death enter the distance.

    ``mode="drop"`` removes them; ``mode="truncate"`` replaces the infinite
    death with ``cap``, which may not lie below any finite coordinate.
    """

    mode: str = "drop"
    cap: float = None

    def __post_init__(self):
        if self.mode not in ("drop", "truncate"):
            raise ValueError(f"unknown infinite-death policy {self.mode!r}")
        if self.mode == "truncate":
            if self.cap is None or not math.isfinite(self.cap):
                raise ValueError("truncate policy requires a finite cap")
        elif self.cap is not None:
            raise ValueError("drop policy takes no cap")

    @classmethod
    def parse(cls, text):
        """Parse ``"drop"`` or ``"truncate=<cap>"``."""
        if isinstance(text, cls):
            return text
        if text is None:
            return cls()
        text = str(text).strip()
        if text == "drop":
            return cls()
        if text.startswith("truncate="):
            try:
                cap = float(text.split("=", 1)[1])
            except ValueError:
                raise ValueError(f"invalid truncate cap in {text!r}") from None
            return cls("truncate", cap)
        raise ValueError(f"invalid infinite-death policy {text!r}")

    def __str__(self):
        return "drop" if self.mode == "drop" else f"truncate={self.cap!r}"

    def apply(self, diagram):
        """Return the finite ``(n, 2)`` point array used for matching."""
        pts = diagram.points
        inf = np.isinf(pts[:, 1])
        if self.mode == "drop":
            return np.ascontiguousarray(pts[~inf])
        finite_vals = np.concatenate([pts[:, 0], pts[~inf, 1]])
        if finite_vals.size and finite_vals.max() > self.cap:
            raise ValueError(
                f"truncate cap {self.cap!r} lies below finite coordinate "
                f"{finite_vals.max()!r}"
            )
        out = pts.copy()
        out[inf, 1] = self.cap
        return np.ascontiguousarray(out[out[:, 0] < out[:, 1]])


@dataclass(frozen=True)
class Matching:
    """Row-to-column assignment and its total cost."""

    assignment: np.ndarray
    total_cost: float


def _cost_matrix(x, y):
    n, m = len(x), len(y)
    c = np.zeros((n + m, n + m))
    if n and m:
        diff = x[:, None, :] - y[None, :, :]
        c[:n, :m] = np.einsum("ijk,ijk->ij", diff, diff)
    if n:
        c[:n, m:] = ((x[:, 1] - x[:, 0]) ** 2 / 2.0)[:, None]
    if m:
        c[n:, :m] = ((y[:, 1] - y[:, 0]) ** 2 / 2.0)[None, :]
    return c


def build_cost_matrix(X, Y):
    """Augmented squared-cost matrix between two finite diagrams.

    Rows are the points of ``X`` followed by ``len(Y)`` diagonal copies;
    columns are the points of ``Y`` followed by ``len(X)`` diagonal copies.
    A point facing a diagonal copy costs its squared distance to the
    diagonal, ``(death - birth)**2 / 2``. Diagonal against diagonal is free.
    """
    x = X.points if isinstance(X, PersistenceDiagram) else np.asarray(X, float)
    y = Y.points if isinstance(Y, PersistenceDiagram) else np.asarray(Y, float)
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("cost matrix requires finite diagrams; apply an InfinitePolicy")
    return _cost_matrix(x.reshape(-1, 2), y.reshape(-1, 2))


def hungarian_assign(cost):
    """Solve the square minimum-cost assignment problem.

    Shortest augmenting paths with row and column potentials, one row at a
    time; O(n^3) overall.

    Parameters
    ----------
    cost : array-like of shape (n, n)
        Finite costs.

    Returns
    -------
    Matching
        ``assignment[i]`` is the column given to row ``i``.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if not np.isfinite(c).all():
        raise ValueError("cost matrix must be finite")
    n = c.shape[0]
    if n == 0:
        return Matching(np.empty(0, dtype=int), 0.0)

    # Index 0 is a virtual column; rows/columns are 1-based in the loop.
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    col_row = np.zeros(n + 1, dtype=int)
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        col_row[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = col_row[j0]
            free = ~used[1:]
            reduced = c[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            u[col_row[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if col_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            col_row[j0] = col_row[j1]
            j0 = j1

    assignment = np.empty(n, dtype=int)
    assignment[col_row[1:] - 1] = np.arange(n)
    total = float(c[np.arange(n), assignment].sum())
    return Matching(assignment, total)


def _canonical(pts):
    return np.ascontiguousarray(pts[np.lexsort((pts[:, 1], pts[:, 0]))])


def _distance_points(x, y):
    if len(x) == 0 and len(y) == 0:
        return 0.0
    # Solve one fixed orientation of the problem so d(X, Y) == d(Y, X) bitwise.
    x, y = _canonical(x), _canonical(y)
    if (len(x), x.tobytes()) > (len(y), y.tobytes()):
        x, y = y, x
    c = _cost_matrix(x, y)
    return math.sqrt(max(hungarian_assign(c).total_cost, 0.0))


def diagram_distance(X, Y, policy="drop"):
    """L2 matching distance between two diagrams of the same degree.

    Parameters
    ----------
    X, Y : PersistenceDiagram
    policy : InfinitePolicy or str, default="drop"
        Treatment of infinite-death points, e.g. ``"truncate=10"``.

    Returns
    -------
    float
    """
    if X.hom_dim != Y.hom_dim:
        raise ValueError(
            f"diagrams have different homology degrees ({X.hom_dim} vs {Y.hom_dim})"
        )
    policy = InfinitePolicy.parse(policy)
    return _distance_points(policy.apply(X), policy.apply(Y))


def _row_distances(i, pts):
    return [_distance_points(pts[i], pts[j]) for j in range(i + 1, len(pts))]


def pairwise_distance_matrix(diagrams, policy="drop", n_jobs=None):
    """Symmetric matrix of pairwise diagram distances.

    Each unordered pair is solved once. The result does not depend on
    ``n_jobs``.

    Returns
    -------
    ndarray of shape (n_diagrams, n_diagrams)
    """
    diagrams = list(diagrams)
    if not diagrams:
        return np.zeros((0, 0))
    dims = {d.hom_dim for d in diagrams}
    if len(dims) != 1:
        raise ValueError(f"diagrams span several homology degrees: {sorted(dims)}")
    policy = InfinitePolicy.parse(policy)
    pts = [_canonical(policy.apply(d)) for d in diagrams]
    n = len(pts)
    n_jobs = effective_n_jobs(n_jobs)
    if n_jobs == 1 or n < 3:
        rows = [_row_distances(i, pts) for i in range(n)]
    else:
        rows = Parallel(n_jobs=n_jobs)(delayed(_row_distances)(i, pts) for i in range(n))
    out = np.zeros((n, n))
    for i, row in enumerate(rows):
        out[i, i + 1:] = row
    return out + out.T
