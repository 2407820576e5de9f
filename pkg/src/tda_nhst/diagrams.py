"""Persistence diagrams, their validation, and the plain-text file format."""

import csv
import math
import os
from pathlib import Path

import numpy as np

__all__ = [
    "DiagramFormatError",
    "PersistenceDiagram",
    "make_diagram",
    "diagonal_projection",
    "read_diagram_file",
    "write_diagram_file",
    "read_diagram_set",
    "write_diagram_set",
]


class DiagramFormatError(ValueError):
    """Raised when a diagram file or diagram-set manifest cannot be parsed."""


class PersistenceDiagram:
    """Multiset of (birth, death) points in a fixed homology degree.

    The diagonal is implicit: points with ``birth == death`` are dropped on
    construction. Instances are immutable and compare by multiset equality.

    Parameters
    ----------
    points : array-like of shape (n_points, 2)
        Birth/death pairs. Deaths may be ``inf``; births must be finite.
    hom_dim : int, default=0
        Homology degree of the diagram.
    """

    __slots__ = ("_points", "_hom_dim")

    def __init__(self, points=(), hom_dim=0):
        if isinstance(hom_dim, bool) or int(hom_dim) != hom_dim or hom_dim < 0:
            raise ValueError(f"hom_dim must be a nonnegative integer, got {hom_dim!r}")
        arr = np.asarray(points, dtype=float)
        if arr.size == 0:
            arr = np.empty((0, 2))
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"points must have shape (n, 2), got {arr.shape}")
        if np.isnan(arr).any():
            raise ValueError("diagram coordinates must not be NaN")
        if np.isinf(arr[:, 0]).any():
            raise ValueError("birth must be finite")
        if np.isneginf(arr[:, 1]).any():
            raise ValueError("death must not be -inf")
        bad = arr[:, 0] > arr[:, 1]
        if bad.any():
            b, d = arr[np.argmax(bad)]
            raise ValueError(f"birth exceeds death: ({b!r}, {d!r})")
        arr = np.ascontiguousarray(arr[arr[:, 0] < arr[:, 1]])
        arr.setflags(write=False)
        self._points = arr
        self._hom_dim = int(hom_dim)

    @property
    def points(self):
        """Read-only ``(n_points, 2)`` array of stored off-diagonal points."""
        return self._points

    @property
    def hom_dim(self):
        return self._hom_dim

    @property
    def births(self):
        return self._points[:, 0]

    @property
    def deaths(self):
        return self._points[:, 1]

    def __len__(self):
        return len(self._points)

    def __iter__(self):
        for b, d in self._points:
            yield (float(b), float(d))

    def _sorted_points(self):
        order = np.lexsort((self._points[:, 1], self._points[:, 0]))
        return self._points[order]

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return (
            self._hom_dim == other._hom_dim
            and len(self) == len(other)
            and np.array_equal(self._sorted_points(), other._sorted_points())
        )

    def __hash__(self):
        return hash((self._hom_dim, self._sorted_points().tobytes()))

    def __repr__(self):
        return f"PersistenceDiagram(n_points={len(self)}, hom_dim={self._hom_dim})"

    def is_finite(self):
        return bool(np.isfinite(self._points[:, 1]).all())

    def n_essential(self):
        """Number of points with infinite death."""
        return int(np.isinf(self._points[:, 1]).sum())

    def finite_part(self):
        """Copy of the diagram without its essential (infinite-death) points."""
        return PersistenceDiagram(
            self._points[np.isfinite(self._points[:, 1])], self._hom_dim
        )


def make_diagram(points, hom_dim=0):
    """Build a validated diagram; zero-persistence points are dropped."""
    return PersistenceDiagram(points, hom_dim)


def diagonal_projection(point):
    """Return the point on the diagonal closest to ``point`` in the plane.

    Parameters
    ----------
    point : tuple of float
        A ``(birth, death)`` pair with finite death.

    Returns
    -------
    tuple of float
        ``((b + d) / 2, (b + d) / 2)``.
    """
    b, d = float(point[0]), float(point[1])
    if not (math.isfinite(b) and math.isfinite(d)):
        raise ValueError("diagonal projection is undefined for infinite coordinates")
    mid = (b + d) / 2.0
    return (mid, mid)


def _format_value(x):
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def _parse_dim_header(line, lineno, path):
    parts = line.lstrip("#").split()
    if len(parts) != 2 or parts[0] != "dim":
        return None
    try:
        k = int(parts[1])
    except ValueError:
        raise DiagramFormatError(
            f"{path}:{lineno}: unknown hom_dim header {line.strip()!r}"
        ) from None
    if k < 0:
        raise DiagramFormatError(f"{path}:{lineno}: hom_dim must be nonnegative")
    return k


def read_diagram_file(path):
    """Read a diagram from a text file.

    Lines are ``<birth> <death>``; ``inf`` is accepted as a death. Lines
    starting with ``#`` are comments, except a ``# dim <k>`` header which
    sets the homology degree (default 0).

    Raises
    ------
    DiagramFormatError
        On a malformed line, with the offending line number.
    """
    path = Path(path)
    hom_dim = 0
    seen_dim = False
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.lstrip("#").split()[:1] == ["dim"]:
                    if seen_dim or rows:
                        raise DiagramFormatError(
                            f"{path}:{lineno}: dim header must appear once, before points"
                        )
                    hom_dim = _parse_dim_header(line, lineno, path)
                    if hom_dim is None:
                        raise DiagramFormatError(
                            f"{path}:{lineno}: unknown hom_dim header {line!r}"
                        )
                    seen_dim = True
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DiagramFormatError(
                    f"{path}:{lineno}: expected '<birth> <death>', got {line!r}"
                )
            try:
                b, d = float(parts[0]), float(parts[1])
            except ValueError:
                raise DiagramFormatError(
                    f"{path}:{lineno}: non-numeric value in {line!r}"
                ) from None
            if math.isnan(b) or math.isnan(d):
                raise DiagramFormatError(f"{path}:{lineno}: NaN coordinate")
            if math.isinf(b):
                raise DiagramFormatError(f"{path}:{lineno}: birth must be finite")
            if b > d:
                raise DiagramFormatError(f"{path}:{lineno}: birth exceeds death")
            rows.append((b, d))
    return PersistenceDiagram(rows, hom_dim)


def write_diagram_file(diagram, path):
    """Write ``diagram`` so that :func:`read_diagram_file` recovers it exactly."""
    lines = [f"# dim {diagram.hom_dim}"]
    lines.extend(f"{_format_value(b)} {_format_value(d)}" for b, d in diagram)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


LABELS_FILE = "labels.csv"


def read_diagram_set(directory):
    """Read a directory of diagram files described by ``labels.csv``.

    Returns
    -------
    names : list of str
        File names in manifest order.
    diagrams : list of PersistenceDiagram
    labels : list of str
        Group label of each diagram.
    """
    directory = Path(directory)
    manifest = directory / LABELS_FILE
    if not manifest.is_file():
        raise DiagramFormatError(f"{directory}: missing {LABELS_FILE}")
    names, labels = [], []
    with open(manifest, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise DiagramFormatError(
                    f"{manifest}:{lineno}: expected '<filename>,<group-label>'"
                )
            name, label = row[0].strip(), row[1].strip()
            if lineno == 1 and not (directory / name).exists() and name.lower() == "filename":
                continue
            names.append(name)
            labels.append(label)
    if not names:
        raise DiagramFormatError(f"{manifest}: no entries")
    diagrams = [read_diagram_file(directory / n) for n in names]
    return names, diagrams, labels


def write_diagram_set(diagrams, labels, directory, names=None):
    """Write diagrams and a ``labels.csv`` manifest into ``directory``."""
    if len(diagrams) != len(labels):
        raise ValueError("diagrams and labels must have the same length")
    directory = Path(directory)
    os.makedirs(directory, exist_ok=True)
    if names is None:
        width = max(3, len(str(len(diagrams))))
        names = [f"diagram_{i:0{width}d}.dgm" for i in range(len(diagrams))]
    for name, dgm in zip(names, diagrams):
        write_diagram_file(dgm, directory / name)
    with open(directory / LABELS_FILE, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for name, label in zip(names, labels):
            writer.writerow([name, label])
    return list(names)
