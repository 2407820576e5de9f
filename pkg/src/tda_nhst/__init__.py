"""Permutation tests for groups of persistence diagrams."""

__version__ = "0.1.0"

from .diagrams import (
    PersistenceDiagram,
    diagonal_projection,
    make_diagram,
    read_diagram_file,
    read_diagram_set,
    write_diagram_file,
    write_diagram_set,
)
from .estimators import (
    ConcurrencePersistence,
    DiagramPermutationTest,
    PairwiseDistance,
    PersistentHomologyTransform,
    RipsPersistence,
)
from .filtrations import (
    FilteredComplex,
    Simplex,
    concurrence_filtration,
    dichotomize,
    height_filtration,
    rips_filtration,
)
from .matching import (
    InfinitePolicy,
    build_cost_matrix,
    diagram_distance,
    hungarian_assign,
    pairwise_distance_matrix,
)
from .nhst import (
    Labeling,
    TestResult,
    exhaustive_test,
    joint_loss,
    randomization_test,
    within_group_variance,
)
from .persistence import compute_persistence, rips_persistence, zero_dim_persistence
from .pht import PHTRepresentation, pht, pht_distance
from .shapes import ShapeSpec, SweepConfig, run_sweep, sample_shape
