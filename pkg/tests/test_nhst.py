import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import exhaustive_p, mean_variance, naive_joint_loss

from tda_nhst.nhst import (
    Labeling,
    TestResult,
    exhaustive_test,
    joint_loss,
    randomization_test,
    within_group_variance,
)


def random_distance_matrix(rng, n):
    pts = rng.normal(size=(n, 3))
    return np.linalg.norm(pts[:, None] - pts[None], axis=-1)


def two_groups(n1, n2):
    return Labeling((range(n1), range(n1, n1 + n2)))


class TestVariance:
    def test_textbook(self):
        assert within_group_variance([1, 2, 3]) == 1.0
        assert within_group_variance([4.5] * 7) == 0.0

    def test_too_short(self):
        with pytest.raises(ValueError):
            within_group_variance([1.0])

    def test_matches_mean_based(self, rng):
        x = rng.normal(size=50)
        assert within_group_variance(x) == pytest.approx(mean_variance(x), abs=1e-12)

    @settings(max_examples=200)
    @given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=60))
    def test_identity_property(self, x):
        assert within_group_variance(x) == pytest.approx(mean_variance(x), rel=1e-9, abs=1e-9)


class TestLabeling:
    def test_valid(self):
        lab = Labeling(([3, 0], [1, 2]))
        assert lab.groups == ((0, 3), (1, 2))
        assert lab.n == 4 and lab.sizes == (2, 2)
        assert lab.n_relabelings() == 6

    @pytest.mark.parametrize(
        "groups",
        [([0, 1], [1, 2]), ([0, 1], [3, 4]), ([0], [1, 2]), ()],
    )
    def test_invalid(self, groups):
        with pytest.raises(ValueError):
            Labeling(groups)

    def test_from_labels(self):
        lab = Labeling.from_labels(["b", "a", "b", "a", "a"])
        assert lab.groups == ((1, 3, 4), (0, 2))

    def test_multinomial_count(self):
        assert Labeling(([0, 1], [2, 3], [4, 5, 6])).n_relabelings() == math.factorial(7) // (2 * 2 * 6)


class TestJointLoss:
    def test_zero(self):
        assert joint_loss(np.zeros((4, 4)), two_groups(2, 2)) == 0

    def test_hand_expansion(self):
        a, b = 3.0, 5.0
        d = np.full((4, 4), 7.0)
        np.fill_diagonal(d, 0)
        d[0, 1] = d[1, 0] = a
        d[2, 3] = d[3, 2] = b
        assert joint_loss(d, two_groups(2, 2)) == a**2 / 2 + b**2 / 2

    def test_matches_naive(self, rng):
        d = random_distance_matrix(rng, 8)
        idx = rng.permutation(8)
        lab = Labeling((idx[:3], idx[3:]))
        assert joint_loss(d, lab) == pytest.approx(naive_joint_loss(d, lab.groups), rel=1e-13)

    def test_k_groups(self, rng):
        d = random_distance_matrix(rng, 9)
        lab = Labeling(([0, 4, 8], [1, 2], [3, 5, 6, 7]))
        assert joint_loss(d, lab) == pytest.approx(naive_joint_loss(d, lab.groups), rel=1e-13)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            joint_loss(np.zeros((5, 5)), two_groups(2, 2))

    def test_rejects_asymmetric(self):
        d = np.zeros((4, 4))
        d[0, 1] = 1
        with pytest.raises(ValueError):
            joint_loss(d, two_groups(2, 2))


def unique_minimizer_matrix():
    # {0,1} and {2,3} are tight clusters far apart
    pts = np.array([[0, 0], [0.1, 0], [10, 0], [10.2, 0]])
    return np.linalg.norm(pts[:, None] - pts[None], axis=-1)


class TestRandomization:
    def test_unique_minimizer(self):
        d = unique_minimizer_matrix()
        lab = two_groups(2, 2)
        exact = exhaustive_test(d, lab)
        assert exact.p_value == pytest.approx(1 / 3)
        res = randomization_test(d, lab, 10_000, seed=11)
        assert abs(res.p_value - 1 / 3) <= 0.02

    def test_all_ties(self):
        d = np.ones((6, 6)) - np.eye(6)
        assert randomization_test(d, two_groups(3, 3), 500, seed=1).p_value == 1.0
        assert exhaustive_test(d, two_groups(3, 3)).p_value == 1.0

    def test_single_replicate(self, rng):
        d = random_distance_matrix(rng, 6)
        res = randomization_test(d, two_groups(3, 3), 1, seed=5)
        assert res.p_value in (0.0, 1.0)

    def test_result_fields(self, rng):
        d = random_distance_matrix(rng, 10)
        res = randomization_test(d, two_groups(5, 5), 5000, seed=2)
        assert isinstance(res, TestResult)
        assert res.p_value == res.count / res.n_replicates
        assert 0 <= res.count <= res.n_replicates
        assert res.seed == 2
        assert res.p_value_add_one == (res.count + 1) / 5001

    def test_deterministic(self, rng):
        d = random_distance_matrix(rng, 12)
        lab = two_groups(6, 6)
        assert randomization_test(d, lab, 9000, seed=99) == randomization_test(d, lab, 9000, seed=99)

    def test_parallel_matches_sequential(self, rng):
        d = random_distance_matrix(rng, 12)
        lab = two_groups(5, 7)
        seq = randomization_test(d, lab, 20_000, seed=4, n_jobs=1)
        par = randomization_test(d, lab, 20_000, seed=4, n_jobs=2)
        assert seq == par

    def test_seed_drawn_when_missing(self, rng):
        d = random_distance_matrix(rng, 6)
        res = randomization_test(d, two_groups(3, 3), 10)
        assert isinstance(res.seed, int) and res.seed >= 0
        again = randomization_test(d, two_groups(3, 3), 10, seed=res.seed)
        assert again == res

    def test_label_symmetry(self, rng):
        d = random_distance_matrix(rng, 10)
        a = Labeling(([0, 2, 4, 6, 8], [1, 3, 5, 7, 9]))
        b = Labeling(([1, 3, 5, 7, 9], [0, 2, 4, 6, 8]))
        assert randomization_test(d, a, 3000, seed=8).count == randomization_test(d, b, 3000, seed=8).count
        assert exhaustive_test(d, a).p_value == exhaustive_test(d, b).p_value

    @pytest.mark.parametrize("scale", [0.25, 2.0, 8.0, 1024.0])
    def test_scale_invariance(self, rng, scale):
        d = random_distance_matrix(rng, 10)
        lab = two_groups(4, 6)
        base = randomization_test(d, lab, 4000, seed=3)
        scaled = randomization_test(scale * d, lab, 4000, seed=3)
        assert scaled.count == base.count
        assert scaled.p_value == base.p_value
        assert scaled.observed_loss == base.observed_loss * scale**2

    def test_scale_invariance_generic_factor(self, rng):
        d = random_distance_matrix(rng, 10)
        lab = two_groups(5, 5)
        base = randomization_test(d, lab, 4000, seed=3)
        assert randomization_test(math.pi * d, lab, 4000, seed=3).count == base.count

    def test_three_groups(self, rng):
        d = random_distance_matrix(rng, 9)
        lab = Labeling(([0, 1, 2], [3, 4, 5], [6, 7, 8]))
        exact = exhaustive_test(d, lab)
        assert exact.n_replicates == 1680
        mc = randomization_test(d, lab, 50_000, seed=0)
        assert abs(mc.p_value - exact.p_value) <= 0.01

    def test_bad_replicates(self, rng):
        with pytest.raises(ValueError):
            randomization_test(random_distance_matrix(rng, 4), two_groups(2, 2), 0, seed=1)

    def test_uniform_splits(self):
        # each of the C(4,2)=6 index sets for group 1 should appear equally often
        d = unique_minimizer_matrix()
        lab = two_groups(2, 2)
        counts = []
        for seed in range(300):
            counts.append(randomization_test(d, lab, 1, seed=seed).count)
        # observed split {0,1}|{2,3} and its mirror are 2 of 6 -> rate 1/3
        rate = np.mean(counts)
        assert abs(rate - 1 / 3) < 4 * math.sqrt(1 / 3 * 2 / 3 / 300)


class TestExhaustive:
    def test_count(self, rng):
        res = exhaustive_test(random_distance_matrix(rng, 4), two_groups(2, 2))
        assert res.n_replicates == 6
        assert res.method == "exhaustive"
        assert res.p_value >= 1 / 6

    def test_matches_oracle(self, rng):
        for _ in range(5):
            d = random_distance_matrix(rng, 9)
            idx = rng.permutation(9)
            lab = Labeling((idx[:4], idx[4:]))
            p, total = exhaustive_p(d, (4, 5), [list(g) for g in lab.groups])
            res = exhaustive_test(d, lab)
            assert res.n_replicates == total
            assert res.p_value == pytest.approx(p, abs=1e-15)

    def test_bound(self, rng):
        d = random_distance_matrix(rng, 20)
        with pytest.raises(ValueError, match="randomization_test"):
            exhaustive_test(d, two_groups(10, 10), max_relabelings=1000)
