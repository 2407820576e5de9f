"""Shape samplers and p-value sweeps for simulated point clouds."""

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from ._parallel import effective_n_jobs
from .matching import pairwise_distance_matrix
from .nhst import Labeling, randomization_test
from .persistence import rips_persistence

__all__ = ["ShapeSpec", "sample_shape", "SweepConfig", "PRESETS", "preset", "run_sweep", "write_sweep_csv"]


@dataclass(frozen=True)
class ShapeSpec:
    """A union of circles with isotropic Gaussian noise.

    Use the :meth:`circle`, :meth:`wedge` and :meth:`concentric`
    constructors rather than filling ``circles`` by hand.
    """

    kind: str
    circles: tuple  # ((cx, cy, radius), ...)
    sigma: float = 0.0

    def __post_init__(self):
        if self.sigma < 0 or not math.isfinite(self.sigma):
            raise ValueError("sigma must be a finite nonnegative number")
        if not self.circles or any(r <= 0 for _, _, r in self.circles):
            raise ValueError("radii must be positive")

    @classmethod
    def circle(cls, radius=1.0, sigma=0.0):
        return cls("circle", ((0.0, 0.0, float(radius)),), float(sigma))

    @classmethod
    def wedge(cls, r1=3 / 5, r2=4 / 5, sigma=0.0):
        """Two circles touching at the origin, centered on the x-axis."""
        return cls("wedge", ((-float(r1), 0.0, float(r1)), (float(r2), 0.0, float(r2))), float(sigma))

    @classmethod
    def concentric(cls, beta, sigma=0.0):
        """Circles of radius ``1 - beta`` and ``1 + beta`` about the origin."""
        return cls("concentric", ((0.0, 0.0, 1.0 - beta), (0.0, 0.0, 1.0 + beta)), float(sigma))


def sample_shape(spec, m, seed=None):
    """Draw ``m`` points uniformly by arc length from ``spec``, then add noise.

    A circle is picked with probability proportional to its circumference
    and the angle is uniform. Noise is N(0, sigma**2) on each coordinate.

    Returns
    -------
    ndarray of shape (m, 2)
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    circles = np.asarray(spec.circles, dtype=float)
    which = rng.choice(len(circles), size=m, p=circles[:, 2] / circles[:, 2].sum())
    theta = rng.uniform(0.0, 2.0 * np.pi, size=m)
    cx, cy, r = circles[which].T
    pts = np.column_stack([cx + r * np.cos(theta), cy + r * np.sin(theta)])
    if spec.sigma > 0:
        pts += rng.normal(0.0, spec.sigma, size=pts.shape)
    return pts


PAIRS = {
    # grid value is the noise level
    "circle-wedge": lambda s: (ShapeSpec.circle(1.0, s), ShapeSpec.wedge(3 / 5, 4 / 5, s)),
    # grid value is beta, no noise
    "circle-concentric": lambda b: (ShapeSpec.circle(1.0), ShapeSpec.concentric(b)),
    # both groups from the same noisy circle; grid value is the noise level
    "circle-circle": lambda s: (ShapeSpec.circle(1.0, s), ShapeSpec.circle(1.0, s)),
}


@dataclass(frozen=True)
class SweepConfig:
    pair: str = "circle-wedge"
    grid: tuple = (0.0,)
    clouds_per_group: int = 20
    n_points: int = 50
    hom_dim: int = 1
    n_replicates: int = 1000
    n_runs: int = 5
    seed: int = 0
    n_jobs: int = field(default=None, compare=False)

    def __post_init__(self):
        if self.pair not in PAIRS:
            raise ValueError(f"unknown shape pair {self.pair!r}; choose from {sorted(PAIRS)}")
        for name in ("n_points", "n_replicates", "n_runs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.clouds_per_group < 2:
            raise ValueError("clouds_per_group must be >= 2")
        if self.hom_dim < 0:
            raise ValueError("hom_dim must be >= 0")
        if any(g < 0 for g in self.grid):
            raise ValueError("grid values must be >= 0")
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))

    def shapes(self, value):
        return PAIRS[self.pair](value)


def _grid(lo, hi, step):
    return tuple(np.round(np.linspace(lo, hi, int(round((hi - lo) / step)) + 1), 10))


PRESETS = {
    "fig3": SweepConfig("circle-wedge", _grid(0, 0.5, 0.01), 20, 50, 1, 1000, 5),
    "fig4": SweepConfig("circle-wedge", _grid(0, 0.5, 0.05), 10, 50, 1, 1000, 200),
    "fig5": SweepConfig("circle-concentric", _grid(0, 0.5, 0.01), 20, 5, 0, 1000, 5),
    "fig6": SweepConfig("circle-concentric", _grid(0, 0.5, 0.01), 20, 10, 0, 1000, 5),
    "fig7": SweepConfig("circle-concentric", _grid(0, 0.5, 0.01), 20, 20, 0, 1000, 5),
}


def preset(name, scale=1.0, seed=0, **overrides):
    """A named sweep, optionally thinned.

    ``scale`` in (0, 1] shrinks the number of grid values (evenly over the
    same range, at least two) and of runs per value (at least one).
    """
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    if not 0 < scale <= 1:
        raise ValueError("scale must lie in (0, 1]")
    cfg = PRESETS[name]
    grid = cfg.grid
    if scale < 1:
        k = max(2, int(round(len(grid) * scale)))
        grid = tuple(np.round(np.linspace(grid[0], grid[-1], k), 10))
    runs = max(1, int(round(cfg.n_runs * scale)))
    return replace(cfg, grid=grid, n_runs=runs, seed=seed, **overrides)


def _cell_seeds(seed, grid_index, run, n_clouds):
    ss = np.random.SeedSequence(seed, spawn_key=(grid_index, run))
    children = ss.spawn(n_clouds + 1)
    return children[:-1], int(children[-1].generate_state(1, np.uint64)[0])


def _run_cell(cfg, grid_index, run):
    value = cfg.grid[grid_index]
    shape_a, shape_b = cfg.shapes(value)
    k = cfg.clouds_per_group
    cloud_seeds, test_seed = _cell_seeds(cfg.seed, grid_index, run, 2 * k)
    specs = [shape_a] * k + [shape_b] * k
    diagrams = [
        rips_persistence(sample_shape(spec, cfg.n_points, s), cfg.hom_dim)[cfg.hom_dim]
        for spec, s in zip(specs, cloud_seeds)
    ]
    d = pairwise_distance_matrix(diagrams)
    labeling = Labeling((range(k), range(k, 2 * k)))
    result = randomization_test(d, labeling, cfg.n_replicates, seed=test_seed)
    return (value, run, result.p_value)


def run_sweep(cfg):
    """p-value for every (grid value, run) cell.

    Each cell samples ``clouds_per_group`` clouds of each shape, computes
    their diagrams in degree ``hom_dim`` and runs the randomization test.
    Cells draw from independent seed streams keyed by their position, so
    results do not depend on ``n_jobs``.

    Returns
    -------
    list of (float, int, float)
        ``(param, run, p_value)`` rows sorted by grid value then run.
    """
    cells = [(g, r) for g in range(len(cfg.grid)) for r in range(cfg.n_runs)]
    n_jobs = effective_n_jobs(cfg.n_jobs)
    if n_jobs == 1:
        rows = [_run_cell(cfg, g, r) for g, r in cells]
    else:
        rows = Parallel(n_jobs=n_jobs)(delayed(_run_cell)(cfg, g, r) for g, r in cells)
    return sorted(rows, key=lambda row: (row[0], row[1]))


def write_sweep_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["param", "run", "p_value"])
        for param, run, p in rows:
            writer.writerow([repr(float(param)), int(run), repr(float(p))])
