"""scikit-learn compatible wrappers.

The transformers map raw observations to diagrams and diagrams to a
distance matrix, and :class:`DiagramPermutationTest` consumes either, so
the whole test fits in a :class:`sklearn.pipeline.Pipeline`::

    Pipeline([
        ("ph", RipsPersistence(homology_dimension=1)),
        ("dist", PairwiseDistance()),
        ("test", DiagramPermutationTest(metric="precomputed", random_state=0)),
    ]).fit(clouds, labels)
"""

import numbers

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_diagrams, check_distance_matrix, check_point_cloud
from .filtrations import concurrence_filtration, dichotomize
from .matching import InfinitePolicy, diagram_distance, pairwise_distance_matrix
from .nhst import Labeling, draw_seed, exhaustive_test, randomization_test
from .persistence import compute_persistence, rips_persistence
from .pht import PHTRepresentation, pht, pht_distance

__all__ = [
    "RipsPersistence",
    "ConcurrencePersistence",
    "PersistentHomologyTransform",
    "PairwiseDistance",
    "DiagramPermutationTest",
]


class RipsPersistence(TransformerMixin, BaseEstimator):
    """Vietoris-Rips persistence diagram of each point cloud.

    Parameters
    ----------
    homology_dimension : int, default=1
    max_radius : float, optional
        Edge-length threshold; defaults to each cloud's diameter.
    """

    def __init__(self, homology_dimension=1, max_radius=None):
        self.homology_dimension = homology_dimension
        self.max_radius = max_radius

    def fit(self, X, y=None):
        if not isinstance(self.homology_dimension, numbers.Integral) or self.homology_dimension < 0:
            raise ValueError("homology_dimension must be a nonnegative integer")
        return self

    def transform(self, X):
        """List of diagrams, one per cloud in ``X``."""
        k = self.homology_dimension
        return [rips_persistence(check_point_cloud(c), k, self.max_radius)[k] for c in X]


class ConcurrencePersistence(TransformerMixin, BaseEstimator):
    """Concurrence persistence diagram of each activity matrix.

    Parameters
    ----------
    homology_dimension : int, default=0
    cutoff : float, optional
        If given, raw matrices are dichotomized at this value; otherwise
        they must already be binary.
    """

    def __init__(self, homology_dimension=0, cutoff=None):
        self.homology_dimension = homology_dimension
        self.cutoff = cutoff

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        k = self.homology_dimension
        out = []
        for a in X:
            a = np.asarray(a)
            if self.cutoff is not None:
                a = dichotomize(a, self.cutoff)
            out.append(compute_persistence(concurrence_filtration(a, k + 1), k)[k])
        return out


class PersistentHomologyTransform(TransformerMixin, BaseEstimator):
    """Degree-0 persistent homology transform of each polygon."""

    def __init__(self, n_directions=64, normalize=False):
        self.n_directions = n_directions
        self.normalize = normalize

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return [pht(p, self.n_directions, self.normalize) for p in X]


def _is_pht(X):
    return len(X) > 0 and isinstance(X[0], PHTRepresentation)


def _pairwise(X, infinite, n_jobs):
    if _is_pht(X):
        n = len(X)
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                out[i, j] = out[j, i] = pht_distance(X[i], X[j])
        return out
    return pairwise_distance_matrix(check_diagrams(X), infinite, n_jobs=n_jobs)


class PairwiseDistance(TransformerMixin, BaseEstimator):
    """Matching distances between diagrams (or PHT representations).

    ``fit_transform(X)`` returns the symmetric matrix over ``X``;
    ``transform(Y)`` after ``fit(X)`` returns distances from each element
    of ``Y`` to each fitted element.

    Parameters
    ----------
    infinite : str, default="drop"
        ``"drop"`` or ``"truncate=<cap>"``.
    n_jobs : int, optional
    """

    def __init__(self, infinite="drop", n_jobs=None):
        self.infinite = infinite
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        self.policy_ = InfinitePolicy.parse(self.infinite)
        self.fit_data_ = list(X)
        return self

    def fit_transform(self, X, y=None):
        self.fit(X)
        return _pairwise(self.fit_data_, self.policy_, self.n_jobs)

    def transform(self, X):
        check_is_fitted(self, "fit_data_")
        X = list(X)
        out = np.zeros((len(X), len(self.fit_data_)))
        for i, a in enumerate(X):
            for j, b in enumerate(self.fit_data_):
                if isinstance(a, PHTRepresentation):
                    out[i, j] = pht_distance(a, b)
                else:
                    out[i, j] = diagram_distance(a, b, self.policy_)
        return out


class DiagramPermutationTest(BaseEstimator):
    """Randomization test that groups of diagrams share a distribution.

    Parameters
    ----------
    n_replicates : int, default=1000
    random_state : int, optional
        Seed. When ``None`` a seed is drawn and stored in ``seed_``.
    exhaustive : bool, default=False
        Enumerate every relabeling instead of sampling.
    metric : {"matching", "precomputed"}, default="matching"
        With ``"precomputed"``, ``X`` passed to :meth:`fit` is a square
        distance matrix.
    infinite : str, default="drop"
    n_jobs : int, optional

    Attributes
    ----------
    result_ : TestResult
    p_value_ : float
    observed_loss_ : float
    classes_ : ndarray
        Group labels, in the order of the groups.
    distance_matrix_ : ndarray
    seed_ : int or None
    """

    def __init__(
        self,
        n_replicates=1000,
        random_state=None,
        exhaustive=False,
        metric="matching",
        infinite="drop",
        n_jobs=None,
    ):
        self.n_replicates = n_replicates
        self.random_state = random_state
        self.exhaustive = exhaustive
        self.metric = metric
        self.infinite = infinite
        self.n_jobs = n_jobs

    def fit(self, X, y):
        if self.metric == "precomputed":
            d = check_distance_matrix(X, atol=1e-12)
        elif self.metric == "matching":
            X = list(X)
            d = _pairwise(X, InfinitePolicy.parse(self.infinite), self.n_jobs)
        else:
            raise ValueError(f"unknown metric {self.metric!r}")
        y = np.asarray(y)
        if y.shape != (d.shape[0],):
            raise ValueError(f"y must have one label per observation ({d.shape[0]})")
        self.classes_ = np.unique(y)
        labeling = Labeling.from_labels(y)
        self.distance_matrix_ = d
        if self.exhaustive:
            self.seed_ = None
            self.result_ = exhaustive_test(d, labeling)
        else:
            self.seed_ = self._seed()
            self.result_ = randomization_test(
                d, labeling, self.n_replicates, seed=self.seed_, n_jobs=self.n_jobs
            )
        self.p_value_ = self.result_.p_value
        self.observed_loss_ = self.result_.observed_loss
        return self

    def _seed(self):
        rs = self.random_state
        if rs is None:
            return draw_seed()
        if isinstance(rs, numbers.Integral):
            return int(rs)
        if isinstance(rs, np.random.Generator):
            return int(rs.integers(0, 2**63))
        if isinstance(rs, np.random.RandomState):
            return int(rs.randint(0, 2**31))
        raise ValueError(f"random_state must be an int, Generator or None, got {rs!r}")
