import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from broadrec.corpus import RatingEvent
from broadrec.diversity import (
    ZeroVarianceWarning,
    list_diversity,
    pearson_distance,
    split_cohorts,
    user_history_diversity,
)


def oracle_pearson(a, b):
    """Textbook Pearson correlation distance, written independently."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    am, bm = a - a.mean(), b - b.mean()
    denom = np.sqrt((am**2).sum()) * np.sqrt((bm**2).sum())
    if denom == 0:
        return 1.0
    return 1.0 - float((am * bm).sum()) / float(denom)


def oracle_list_diversity(vectors):
    """Brute-force double loop over all ordered pairs."""
    n = len(vectors)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += oracle_pearson(vectors[i], vectors[j])
    return total / (n * (n - 1))


finite_vec = arrays(
    np.float64,
    st.integers(min_value=2, max_value=12),
    elements=st.floats(min_value=-100, max_value=100, allow_nan=False),
)


class TestPearsonDistance:
    def test_identical_nonconstant_is_zero(self):
        a = np.array([0.1, 0.9, 0.4])
        assert pearson_distance(a, a) == pytest.approx(0.0, abs=1e-12)

    def test_perfect_anticorrelation_is_two(self):
        a = np.array([1.0, 2.0, 5.0, 3.0])
        assert pearson_distance(a, -a + 7.0) == pytest.approx(2.0, abs=1e-12)

    def test_hand_example(self):
        # r = -1 for these complementary indicator vectors
        assert pearson_distance(np.array([1.0, 0, 1]), np.array([0.0, 1, 0])) == pytest.approx(2.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            pearson_distance(np.zeros(3), np.zeros(4))

    def test_zero_variance_flags_and_returns_one(self):
        with pytest.warns(ZeroVarianceWarning):
            assert pearson_distance(np.ones(5), np.arange(5.0)) == 1.0

    @given(a=finite_vec)
    @settings(max_examples=50, deadline=None)
    def test_symmetry_exact(self, a):
        b = np.roll(a, 1) + 0.25
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroVarianceWarning)
            assert pearson_distance(a, b) == pearson_distance(b, a)

    @given(
        alpha=st.floats(min_value=0.01, max_value=50),
        beta=st.floats(min_value=-50, max_value=50),
    )
    @settings(max_examples=50, deadline=None)
    def test_scale_shift_invariance(self, alpha, beta):
        rng = np.random.default_rng(17)
        a = rng.normal(size=16)
        b = rng.normal(size=16)
        assert pearson_distance(alpha * a + beta, b) == pytest.approx(
            pearson_distance(a, b), abs=1e-10
        )


class TestListDiversity:
    def test_two_identical_vectors(self):
        v = np.array([0.2, 0.8, 0.5])
        assert list_diversity([v, v]) == pytest.approx(0.0, abs=1e-12)

    def test_two_vectors_equals_their_distance(self):
        a = np.array([0.1, 0.5, 0.9, 0.2])
        b = np.array([0.7, 0.3, 0.2, 0.8])
        assert list_diversity([a, b]) == pytest.approx(pearson_distance(a, b), rel=1e-12)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(123)
        vectors = rng.uniform(size=(10, 32))
        expected = oracle_list_diversity(vectors)
        assert list_diversity(vectors) == pytest.approx(expected, rel=1e-12)

    def test_single_item_rejected(self):
        with pytest.raises(ValueError, match="below two items"):
            list_diversity([np.array([0.1, 0.2])])

    def test_permutation_invariance_is_exact(self):
        rng = np.random.default_rng(9)
        vectors = rng.uniform(size=(8, 16))
        base = list_diversity(vectors)
        for seed in range(5):
            perm = np.random.default_rng(seed).permutation(8)
            assert list_diversity(vectors[perm]) == base  # bit-exact


class TestUserHistoryDiversity:
    def _genome(self, rows):
        from broadrec.corpus import Genome, TagLabel

        movie_ids = sorted(rows)
        matrix = np.vstack([rows[m] for m in movie_ids])
        tags = [TagLabel(i, f"t{i}") for i in range(matrix.shape[1])]
        return Genome(movie_ids, matrix, tags)

    def test_two_identical_genomes_zero(self):
        genome = self._genome({1: np.array([0.4, 0.9, 0.1]), 2: np.array([0.4, 0.9, 0.1])})
        ratings = [RatingEvent(7, 1, 4.0, 10), RatingEvent(7, 2, 3.0, 20)]
        assert user_history_diversity(7, ratings, genome) == pytest.approx(0.0, abs=1e-12)

    def test_single_movie_excluded(self):
        genome = self._genome({1: np.array([0.4, 0.9, 0.1])})
        assert user_history_diversity(7, [RatingEvent(7, 1, 4.0, 10)], genome) is None

    def test_matches_oracle(self):
        rng = np.random.default_rng(4)
        rows = {m: rng.uniform(size=24) for m in range(1, 7)}
        genome = self._genome(rows)
        ratings = [RatingEvent(3, m, 4.0, m) for m in range(1, 7)]
        expected = oracle_list_diversity([rows[m] for m in range(1, 7)])
        assert user_history_diversity(3, ratings, genome) == pytest.approx(expected, rel=1e-12)

    def test_since_filter(self):
        rng = np.random.default_rng(4)
        rows = {m: rng.uniform(size=24) for m in range(1, 4)}
        genome = self._genome(rows)
        ratings = [RatingEvent(3, m, 4.0, m * 100) for m in range(1, 4)]
        assert user_history_diversity(3, ratings, genome, since=300) is None


class TestSplitCohorts:
    def test_four_scores(self):
        split = split_cohorts({1: 0.1, 2: 0.2, 3: 0.3, 4: 0.4})
        assert split.nondiverse == {1, 2}
        assert split.diverse == {3, 4}
        assert split.threshold == pytest.approx(0.25)

    def test_all_equal_ties_to_nondiverse_by_user_id(self):
        split = split_cohorts({u: 0.5 for u in range(1, 6)})
        assert split.nondiverse == {1, 2, 3}
        assert split.diverse == {4, 5}

    def test_1859_users(self):
        rng = np.random.default_rng(0)
        scores = {u: float(s) for u, s in enumerate(rng.uniform(size=1859), start=1)}
        split = split_cohorts(scores)
        assert len(split.diverse) + len(split.nondiverse) == 1859
        assert sorted((len(split.diverse), len(split.nondiverse))) == [929, 930]
        assert len(split.nondiverse) == 930  # odd count: extra user lands NonDiverse

    @given(
        st.dictionaries(
            st.integers(min_value=1, max_value=10_000),
            st.floats(min_value=0, max_value=2, allow_nan=False),
            min_size=2,
            max_size=60,
        )
    )
    @settings(max_examples=80, deadline=None)
    def test_partition_properties(self, scores):
        split = split_cohorts(scores)
        assert split.diverse | split.nondiverse == set(scores)
        assert not (split.diverse & split.nondiverse)
        assert abs(len(split.diverse) - len(split.nondiverse)) <= 1
        if len(set(scores.values())) == len(scores):
            assert max(scores[u] for u in split.nondiverse) <= min(
                scores[u] for u in split.diverse
            )
