"""Bundled example data."""

import csv
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = ["concurrence_demo_path", "load_concurrence_demo", "read_matrix_csv"]


def read_matrix_csv(path):
    """Comma-separated numeric matrix, one row per line."""
    return np.loadtxt(path, delimiter=",", ndmin=2)


def concurrence_demo_path():
    """Directory with eight synthetic 50x10 binary activity matrices and ``labels.csv``.

    Subjects labelled ``network`` have five variables driven by a shared
    on/off signal; ``independent`` subjects have independent variables.
    """
    return Path(resources.files("tda_nhst") / "data" / "concurrence_demo")


def load_concurrence_demo():
    """Return ``(names, matrices, labels)`` for the bundled demo set."""
    root = concurrence_demo_path()
    names, labels = [], []
    with open(root / "labels.csv", newline="", encoding="utf-8") as fh:
        for name, label in csv.reader(fh):
            names.append(name)
            labels.append(label)
    matrices = [read_matrix_csv(root / n).astype(np.int8) for n in names]
    return names, matrices, labels
