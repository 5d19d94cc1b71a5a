import math

import numpy as np
import pytest

from broadrec.clustering import ClusterModel
from broadrec.diversity import list_diversity
from broadrec.recommenders import ScoredCandidate
from broadrec.rerank import (
    greedy_cluster_order,
    max_per_cluster,
    rerank_pages,
    rerank_response,
    select_cluster_subset,
    subset_size,
)


def make_cluster_model(k=24, dim=32, seed=0, rating_counts=None):
    rng = np.random.default_rng(seed)
    centroids = rng.uniform(size=(k, dim))
    counts = (
        np.asarray(rating_counts)
        if rating_counts is not None
        else rng.integers(10, 500, size=k)
    )
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignment={},
        rating_count=counts.astype(np.int64),
    )


def make_pool(model, n_candidates, movies_per_cluster=None, seed=0):
    """Candidate pool with round-robin cluster assignment and random scores."""
    rng = np.random.default_rng(seed)
    assignment = {}
    candidates = []
    for i in range(n_candidates):
        movie_id = i + 1
        assignment[movie_id] = (
            movies_per_cluster[i] if movies_per_cluster is not None else i % model.k
        )
        candidates.append(ScoredCandidate(movie_id, float(rng.uniform(1, 5))))
    candidates.sort(key=lambda c: (-c.score, c.movie_id))
    return candidates, assignment


# --------------------------------------------------------------------------
# Independent oracle re-implementations (deliberately naive)
# --------------------------------------------------------------------------

def oracle_pearson(a, b):
    am, bm = a - a.mean(), b - b.mean()
    denom = math.sqrt(float((am**2).sum())) * math.sqrt(float((bm**2).sum()))
    if denom == 0:
        return 1.0
    return 1.0 - float((am * bm).sum()) / denom


def oracle_subset(model, level):
    """Exhaustive greedy replay: recompute full Eq.-1 mean at every step."""
    k = model.k
    target = min(k, 5 * level)
    best_seed = max(range(k), key=lambda c: (model.rating_count[c], -c))
    chosen = [best_seed]
    while len(chosen) < target:
        best, best_div = None, None
        for c in range(k):
            if c in chosen:
                continue
            members = chosen + [c]
            total = 0.0
            for i in members:
                for j in members:
                    if i != j:
                        total += oracle_pearson(model.centroids[i], model.centroids[j])
            div = total / (len(members) * (len(members) - 1))
            if best_div is None or div < best_div - 1e-15 or (
                abs(div - best_div) <= 1e-15 and c < best
            ):
                best, best_div = c, div
        chosen.append(best)
    return chosen


def oracle_pages(candidates, subset, level, assignment, pages=3, page_size=24):
    """Straightforward replay of the page construction with the relaxation ladder."""
    quota = math.ceil(page_size / (5 * level))
    subset_set = set(subset)
    pool = list(candidates)
    out = []
    for page_index in range(1, pages + 1):
        slots = []
        counts = {}
        taken_ids = set()
        for cand in pool:
            if len(slots) == page_size:
                break
            c = assignment[cand.movie_id]
            if c in subset_set and counts.get(c, 0) < quota:
                slots.append((cand.movie_id, c))
                counts[c] = counts.get(c, 0) + 1
                taken_ids.add(cand.movie_id)
        degraded = len(slots) < page_size
        if degraded:
            for cand in pool:
                if len(slots) == page_size:
                    break
                if cand.movie_id in taken_ids:
                    continue
                if assignment[cand.movie_id] in subset_set:
                    slots.append((cand.movie_id, assignment[cand.movie_id]))
                    taken_ids.add(cand.movie_id)
            for cand in pool:
                if len(slots) == page_size:
                    break
                if cand.movie_id in taken_ids:
                    continue
                slots.append((cand.movie_id, assignment[cand.movie_id]))
                taken_ids.add(cand.movie_id)
        pool = [c for c in pool if c.movie_id not in taken_ids]
        out.append((page_index, slots, degraded))
    return out


# --------------------------------------------------------------------------
# Level arithmetic
# --------------------------------------------------------------------------

class TestLevelArithmetic:
    def test_subset_sizes(self):
        assert [subset_size(level) for level in (1, 2, 3, 4, 5)] == [5, 10, 15, 20, 24]

    def test_quotas(self):
        assert [max_per_cluster(level) for level in (1, 2, 3, 4, 5)] == [5, 3, 2, 2, 1]

    def test_quota_times_subset_covers_page(self):
        for level in (1, 2, 3, 4, 5):
            assert subset_size(level) * max_per_cluster(level) >= 24

    def test_invalid_level_rejected(self):
        for bad in (0, 6, -1, 2.5):
            with pytest.raises(ValueError):
                subset_size(bad)


# --------------------------------------------------------------------------
# Subset selection
# --------------------------------------------------------------------------

class TestSelectClusterSubset:
    def test_level5_uses_all_24(self):
        model = make_cluster_model(seed=1)
        assert len(select_cluster_subset(model, 5)) == 24
        assert sorted(select_cluster_subset(model, 5).cluster_ids) == list(range(24))

    def test_level3_uses_15(self):
        model = make_cluster_model(seed=2)
        assert len(select_cluster_subset(model, 3)) == 15

    def test_seed_cluster_has_max_rating_count(self):
        counts = np.arange(24)[::-1]  # cluster 0 most rated
        model = make_cluster_model(seed=3, rating_counts=counts)
        assert select_cluster_subset(model, 1).cluster_ids[0] == 0

    def test_matches_exhaustive_greedy_oracle(self):
        for seed in (4, 5, 6):
            model = make_cluster_model(seed=seed)
            for level in (1, 2, 5):
                assert (
                    select_cluster_subset(model, level).cluster_ids
                    == oracle_subset(model, level)[: subset_size(level)]
                )

    def test_nested_prefix_property(self):
        model = make_cluster_model(seed=7)
        order = greedy_cluster_order(model)
        for level in (1, 2, 3, 4):
            assert select_cluster_subset(model, level).cluster_ids == order[: subset_size(level)]
            assert (
                select_cluster_subset(model, level + 1).cluster_ids[: subset_size(level)]
                == select_cluster_subset(model, level).cluster_ids
            )


# --------------------------------------------------------------------------
# Page construction
# --------------------------------------------------------------------------

class TestRerankPages:
    def test_level5_one_per_cluster_each_page(self):
        model = make_cluster_model(seed=8)
        candidates, assignment = make_pool(model, 600, seed=8)
        model.assignment = assignment
        pages = rerank_response(model, candidates, 5)
        for page in pages:
            assert len(page.slots) == 24
            assert not page.degraded
            clusters = [s.cluster_id for s in page.slots]
            assert sorted(clusters) == list(range(24))  # exactly one per cluster

    def test_constraint_inactive_page_is_top24(self):
        model = make_cluster_model(seed=9)
        subset = select_cluster_subset(model, 1)
        # All candidates in the seed 5-subset, spread so quota (5) never binds.
        clusters = [subset.cluster_ids[i % 5] for i in range(48)]
        candidates, assignment = make_pool(model, 48, movies_per_cluster=clusters, seed=9)
        pages = rerank_pages(candidates, subset, 1, assignment)
        assert [s.movie_id for s in pages[0].slots] == [c.movie_id for c in candidates[:24]]
        assert not pages[0].degraded

    def test_matches_oracle_replay_all_levels(self):
        for seed in (10, 11):
            model = make_cluster_model(seed=seed)
            candidates, assignment = make_pool(model, 600, seed=seed)
            model.assignment = assignment
            for level in (1, 2, 3, 4, 5):
                subset = select_cluster_subset(model, level)
                got = rerank_pages(candidates, subset, level, assignment)
                expected = oracle_pages(candidates, subset.cluster_ids, level, assignment)
                for page, (index, slots, degraded) in zip(got, expected):
                    assert page.page_index == index
                    assert page.degraded == degraded
                    assert [(s.movie_id, s.cluster_id) for s in page.slots] == slots

    def test_no_duplicates_across_pages(self):
        model = make_cluster_model(seed=12)
        candidates, assignment = make_pool(model, 400, seed=12)
        model.assignment = assignment
        for level in (1, 3, 5):
            pages = rerank_response(model, candidates, level)
            ids = [s.movie_id for p in pages for s in p.slots]
            assert len(ids) == len(set(ids))

    def test_quota_respected_on_non_degraded_pages(self):
        model = make_cluster_model(seed=13)
        candidates, assignment = make_pool(model, 600, seed=13)
        model.assignment = assignment
        for level in (1, 2, 3, 4, 5):
            quota = max_per_cluster(level)
            subset = set(select_cluster_subset(model, level).cluster_ids)
            for page in rerank_response(model, candidates, level):
                if page.degraded:
                    continue
                counts = {}
                for slot in page.slots:
                    assert slot.cluster_id in subset
                    counts[slot.cluster_id] = counts.get(slot.cluster_id, 0) + 1
                assert max(counts.values()) <= quota

    def test_distinct_cluster_count_non_decreasing_in_level(self):
        model = make_cluster_model(seed=14)
        # >= 3 candidates per cluster on page 1's worth of pool
        clusters = [i % 24 for i in range(24 * 12)]
        candidates, assignment = make_pool(model, 24 * 12, movies_per_cluster=clusters, seed=14)
        model.assignment = assignment
        distinct = []
        for level in (1, 2, 3, 4, 5):
            page1 = rerank_response(model, candidates, level)[0]
            distinct.append(len({s.cluster_id for s in page1.slots}))
        assert distinct == sorted(distinct)

    def test_empty_pool_rejected(self):
        model = make_cluster_model(seed=15)
        with pytest.raises(ValueError, match="empty"):
            rerank_response(model, [], 3)

    def test_unsorted_pool_rejected(self):
        model = make_cluster_model(seed=16)
        candidates, assignment = make_pool(model, 10, seed=16)
        model.assignment = assignment
        with pytest.raises(ValueError, match="sorted"):
            rerank_pages(candidates[::-1], select_cluster_subset(model, 3), 3, assignment)

    def test_missing_cluster_assignment_rejected(self):
        model = make_cluster_model(seed=17)
        candidates, assignment = make_pool(model, 10, seed=17)
        del assignment[candidates[0].movie_id]
        with pytest.raises(KeyError):
            rerank_pages(candidates, select_cluster_subset(model, 3), 3, assignment)


class TestFallback:
    def test_single_cluster_pool_level5(self):
        model = make_cluster_model(seed=18)
        subset5 = select_cluster_subset(model, 5)
        one_cluster = subset5.cluster_ids[0]
        candidates, assignment = make_pool(
            model, 30, movies_per_cluster=[one_cluster] * 30, seed=18
        )
        pages = rerank_pages(candidates, subset5, 5, assignment)
        assert len(pages[0].slots) == 24
        assert pages[0].degraded
        assert {s.cluster_id for s in pages[0].slots} == {one_cluster}

    def test_tiny_pool_short_page(self):
        model = make_cluster_model(seed=19)
        candidates, assignment = make_pool(model, 10, seed=19)
        model.assignment = assignment
        pages = rerank_response(model, candidates, 5)
        assert len(pages[0].slots) == 10
        assert pages[0].degraded
        assert pages[1].slots == [] and pages[1].degraded

    def test_adversarial_mix_matches_oracle(self):
        # Heavy skew: half the pool in one subset cluster, some out-of-subset.
        model = make_cluster_model(seed=20)
        subset = select_cluster_subset(model, 2)
        inside = subset.cluster_ids
        outside = [c for c in range(24) if c not in inside]
        clusters = (
            [inside[0]] * 40 + [inside[1]] * 3 + outside[:5] + [inside[2]] * 2
        )
        candidates, assignment = make_pool(
            model, len(clusters), movies_per_cluster=clusters, seed=20
        )
        got = rerank_pages(candidates, subset, 2, assignment)
        expected = oracle_pages(candidates, subset.cluster_ids, 2, assignment)
        for page, (index, slots, degraded) in zip(got, expected):
            assert page.degraded == degraded
            assert [(s.movie_id, s.cluster_id) for s in page.slots] == slots


class TestDiversityMonotonicity:
    def test_mean_page1_diversity_non_decreasing_in_level(self):
        """Statistical property over >= 20 seeded trials on planted clusters."""
        from broadrec.synth import make_genome
        from broadrec.clustering import kmeans

        n_trials = 20
        sums = np.zeros(5)
        for trial in range(n_trials):
            planted = make_genome(24 * 14, n_clusters=24, dim=96, noise=0.03, seed=trial)
            model = kmeans(planted.genome, k=24, seed=trial)
            rng = np.random.default_rng(1000 + trial)
            scores = rng.uniform(1, 5, size=len(planted.genome.movie_ids))
            candidates = sorted(
                (
                    ScoredCandidate(m, float(s))
                    for m, s in zip(planted.genome.movie_ids, scores)
                ),
                key=lambda c: (-c.score, c.movie_id),
            )
            for i, level in enumerate((1, 2, 3, 4, 5)):
                page1 = rerank_response(model, candidates, level)[0]
                vectors = planted.genome.vectors([s.movie_id for s in page1.slots])
                sums[i] += list_diversity(vectors)
        means = sums / n_trials
        assert all(b >= a - 1e-12 for a, b in zip(means, means[1:])), means
