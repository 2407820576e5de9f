"""Randomization test on a precomputed distance matrix.

The statistic is the sum over groups of the within-group variance,
written as a mean of squared pairwise distances so that a relabeling only
reads cells of the distance table.
"""

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np
from joblib import Parallel, delayed

from ._parallel import effective_n_jobs
from ._validation import check_distance_matrix

__all__ = [
    "Labeling",
    "TestResult",
    "within_group_variance",
    "joint_loss",
    "randomization_test",
    "exhaustive_test",
    "draw_seed",
]

# Replicates are drawn in fixed-size blocks, each from its own child of the
# seed sequence, so the count does not depend on how blocks are scheduled.
BLOCK_SIZE = 4096
DEFAULT_MAX_RELABELINGS = 10**6


@dataclass(frozen=True)
class Labeling:
    """Partition of ``range(n)`` into groups of at least two indices each."""

    groups: tuple

    def __post_init__(self):
        groups = tuple(tuple(sorted(int(i) for i in g)) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        if len(groups) < 1:
            raise ValueError("a labeling needs at least one group")
        flat = [i for g in groups for i in g]
        if len(set(flat)) != len(flat):
            raise ValueError("groups must be disjoint")
        if sorted(flat) != list(range(len(flat))):
            raise ValueError("groups must cover the indices 0..n-1")
        small = [len(g) for g in groups if len(g) < 2]
        if small:
            raise ValueError(f"every group needs at least 2 members, got size {small[0]}")

    @classmethod
    def from_labels(cls, labels):
        """Group indices by label; groups follow the sorted order of the labels."""
        labels = np.asarray(labels)
        classes = np.unique(labels)
        return cls(tuple(np.flatnonzero(labels == c).tolist() for c in classes))

    @property
    def n(self):
        return sum(len(g) for g in self.groups)

    @property
    def sizes(self):
        return tuple(len(g) for g in self.groups)

    def n_relabelings(self):
        """Number of size-preserving assignments of indices to groups."""
        total, left = 1, self.n
        for size in self.sizes:
            total *= math.comb(left, size)
            left -= size
        return total


@dataclass(frozen=True)
class TestResult:
    """Outcome of a randomization or exhaustive test.

    ``p_value`` is exactly ``count / n_replicates``.
    """

    __test__ = False  # not a pytest class

    observed_loss: float
    p_value: float
    n_replicates: int
    count: int
    seed: int = None
    method: str = "randomization"

    @property
    def p_value_add_one(self):
        """``(count + 1) / (n_replicates + 1)``, never zero."""
        return (self.count + 1) / (self.n_replicates + 1)

    def to_dict(self):
        return asdict(self)


def within_group_variance(values):
    """Sample variance computed from pairwise differences.

    ``sum_i sum_j (x_i - x_j)**2 / (2 n (n - 1))``, which equals the usual
    mean-based sample variance with denominator ``n - 1``.
    """
    x = np.asarray(values, dtype=float).reshape(-1)
    n = len(x)
    if n < 2:
        raise ValueError("variance needs at least 2 values")
    diff = np.subtract.outer(x, x)
    return float((diff * diff).sum() / (2.0 * n * (n - 1)))


def _group_terms(sq, blocks):
    """Loss for a batch of labelings given as per-group index blocks."""
    total = np.zeros(len(blocks[0]))
    for idx in blocks:
        idx = np.sort(idx, axis=1)
        b, k = idx.shape
        cells = sq[idx[:, :, None], idx[:, None, :]].reshape(b, k * k)
        total += cells.sum(axis=1) / (2.0 * k * (k - 1))
    return total


def _split(perms, sizes):
    bounds = np.cumsum((0,) + tuple(sizes))
    return [perms[:, lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:])]


def _check_inputs(d, labeling):
    d = check_distance_matrix(d)
    if not isinstance(labeling, Labeling):
        labeling = Labeling(labeling)
    if labeling.n != d.shape[0]:
        raise ValueError(
            f"labeling covers {labeling.n} items but the distance matrix has {d.shape[0]}"
        )
    return d, labeling


def _observed_loss(sq, labeling):
    blocks = [np.asarray(g).reshape(1, -1) for g in labeling.groups]
    return float(_group_terms(sq, blocks)[0])


def joint_loss(d, labeling):
    """Sum over groups of ``sum_{i,j in group} d[i, j]**2 / (2 n_m (n_m - 1))``.

    Parameters
    ----------
    d : array-like of shape (n, n)
        Pairwise distances.
    labeling : Labeling or sequence of index groups

    Returns
    -------
    float
    """
    d, labeling = _check_inputs(d, labeling)
    return _observed_loss(d * d, labeling)


def draw_seed():
    """Fresh 64-bit seed from OS entropy."""
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])


def _count_block(sq, sizes, seed_seq, n_draws, observed):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    n = sum(sizes)
    perms = rng.permuted(np.tile(np.arange(n), (n_draws, 1)), axis=1)
    losses = _group_terms(sq, _split(perms, sizes))
    return int(np.count_nonzero(losses <= observed))


def randomization_test(d, labeling, n_replicates=1000, seed=None, n_jobs=None):
    """Monte Carlo permutation test on the joint loss.

    Each replicate shuffles the indices uniformly and cuts the result into
    groups of the observed sizes. The p-value is the fraction of replicates
    whose loss is at most the observed loss, ties included.

    Parameters
    ----------
    d : array-like of shape (n, n)
        Pairwise distances.
    labeling : Labeling
    n_replicates : int, default=1000
    seed : int, optional
        Drawn from OS entropy when omitted; always reported in the result.
    n_jobs : int, optional
        Workers for replicate blocks. Does not change the result.

    Returns
    -------
    TestResult
    """
    d, labeling = _check_inputs(d, labeling)
    if n_replicates < 1:
        raise ValueError("n_replicates must be >= 1")
    if seed is None:
        seed = draw_seed()
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    sq = d * d
    observed = _observed_loss(sq, labeling)
    n_blocks = -(-n_replicates // BLOCK_SIZE)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    draws = [min(BLOCK_SIZE, n_replicates - b * BLOCK_SIZE) for b in range(n_blocks)]
    n_jobs = effective_n_jobs(n_jobs)
    args = [(sq, labeling.sizes, c, k, observed) for c, k in zip(children, draws)]
    if n_jobs == 1 or n_blocks == 1:
        counts = [_count_block(*a) for a in args]
    else:
        counts = Parallel(n_jobs=n_jobs)(delayed(_count_block)(*a) for a in args)
    count = sum(counts)
    return TestResult(observed, count / n_replicates, n_replicates, count, seed, "randomization")


def _relabelings(n, sizes):
    """Yield every size-preserving assignment as a flat index permutation."""
    if len(sizes) == 1:
        yield tuple(range(n))
        return

    def rec(remaining, sizes):
        if len(sizes) == 1:
            yield remaining
            return
        for chosen in itertools.combinations(remaining, sizes[0]):
            picked = set(chosen)
            rest = tuple(i for i in remaining if i not in picked)
            for tail in rec(rest, sizes[1:]):
                yield chosen + tail

    yield from rec(tuple(range(n)), tuple(sizes))


def exhaustive_test(d, labeling, max_relabelings=DEFAULT_MAX_RELABELINGS):
    """Exact permutation p-value over every size-preserving relabeling.

    Raises
    ------
    ValueError
        If there are more than ``max_relabelings`` relabelings; use
        :func:`randomization_test` instead.
    """
    d, labeling = _check_inputs(d, labeling)
    total = labeling.n_relabelings()
    if total > max_relabelings:
        raise ValueError(
            f"{total} relabelings exceed the exhaustive limit of {max_relabelings}; "
            "use randomization_test instead"
        )
    sq = d * d
    observed = _observed_loss(sq, labeling)
    count = 0
    it = _relabelings(labeling.n, labeling.sizes)
    while True:
        chunk = list(itertools.islice(it, BLOCK_SIZE))
        if not chunk:
            break
        losses = _group_terms(sq, _split(np.asarray(chunk), labeling.sizes))
        count += int(np.count_nonzero(losses <= observed))
    return TestResult(observed, count / total, total, count, None, "exhaustive")
