"""Level-controlled greedy re-ranking of scored candidates into cluster-quota pages.

A diversity level in 1..5 maps to a cluster subset of size min(24, 5*level)
grown greedily from the most-rated cluster by minimum added correlation
distance, and to a per-page quota of ceiling(24 / (5*level)) movies per
cluster. Three 24-slot pages are then filled by scanning the candidate pool
in score order, consuming each candidate at most once across pages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .clustering import ClusterModel
from .diversity import _pairwise_pearson_distances
from .recommenders import ScoredCandidate

LEVELS = (1, 2, 3, 4, 5)
PAGE_SIZE = 24
PAGES_PER_RESPONSE = 3


def validate_level(level: int) -> int:
    if level not in LEVELS:
        raise ValueError(f"diversity level must be in {set(LEVELS)}, got {level!r}")
    return level


def subset_size(level: int, k: int = 24) -> int:
    validate_level(level)
    return min(k, 5 * level)


def max_per_cluster(level: int, page_size: int = PAGE_SIZE) -> int:
    validate_level(level)
    return math.ceil(page_size / (5 * level))


class Slot(NamedTuple):
    movie_id: int
    score: float
    cluster_id: int


@dataclass
class ClusterSubset:
    cluster_ids: list[int]  # greedy order; the seed (most-rated) cluster first

    def __contains__(self, cluster_id: int) -> bool:
        return cluster_id in self.cluster_ids

    def __len__(self) -> int:
        return len(self.cluster_ids)


@dataclass
class RecPage:
    page_index: int  # 1-based
    slots: list[Slot]
    degraded: bool = False

    def movie_ids(self) -> list[int]:
        return [s.movie_id for s in self.slots]


def greedy_cluster_order(model: ClusterModel) -> list[int]:
    """Full greedy ordering of all clusters; subsets at any level are prefixes.

    Seed: the cluster with the highest rating count (ties: lowest id). Each
    step appends the cluster that minimizes the average pairwise correlation
    distance among the chosen centroids (ties: lowest id).
    """
    k = model.k
    dist = _pairwise_pearson_distances(model.centroids)

    seed = min(range(k), key=lambda c: (-int(model.rating_count[c]), c))
    chosen = [seed]
    # Running sum of distances from each candidate cluster to the chosen set.
    sum_to_chosen = dist[:, seed].copy()
    pair_sum = 0.0  # unordered-pair distance sum inside the chosen set
    remaining = set(range(k)) - {seed}

    while remaining:
        m = len(chosen) + 1
        denom = m * (m - 1)
        best = min(
            remaining,
            key=lambda c: (2.0 * (pair_sum + sum_to_chosen[c]) / denom, c),
        )
        pair_sum += float(sum_to_chosen[best])
        chosen.append(best)
        remaining.remove(best)
        sum_to_chosen += dist[:, best]
    return chosen


def select_cluster_subset(model: ClusterModel, level: int) -> ClusterSubset:
    """The cluster subset for a diversity level: a prefix of the greedy order."""
    size = subset_size(level, model.k)
    return ClusterSubset(greedy_cluster_order(model)[:size])


def _check_sorted(candidates: Sequence[ScoredCandidate]) -> None:
    for prev, cur in zip(candidates, candidates[1:]):
        if cur.score > prev.score:
            raise ValueError("candidate pool must be sorted by score descending")


def rerank_pages(
    candidates: Sequence[ScoredCandidate],
    subset: ClusterSubset,
    level: int,
    assignment: Mapping[int, int],
    pages: int = PAGES_PER_RESPONSE,
    page_size: int = PAGE_SIZE,
) -> list[RecPage]:
    """Build `pages` quota-constrained pages from a score-sorted candidate pool.

    Each page scans the still-unused candidates in score order and appends
    those whose cluster is in the subset and under the per-page quota, until
    `page_size` slots are filled. Candidates are consumed globally, so no
    movie repeats across the pages of one response. A page that cannot fill
    after a whole scan is completed by `fallback_fill` and flagged degraded.
    """
    validate_level(level)
    if not candidates:
        raise ValueError("candidate pool is empty")
    _check_sorted(candidates)

    quota = max_per_cluster(level, page_size)
    in_subset = set(subset.cluster_ids)
    remaining: list[Slot] = []
    for cand in candidates:
        cluster = assignment.get(cand.movie_id)
        if cluster is None:
            raise KeyError(f"candidate movie {cand.movie_id} has no cluster assignment")
        remaining.append(Slot(cand.movie_id, cand.score, cluster))

    result: list[RecPage] = []
    for page_index in range(1, pages + 1):
        slots: list[Slot] = []
        counts: dict[int, int] = {}
        kept: list[Slot] = []
        for slot in remaining:
            if (
                len(slots) < page_size
                and slot.cluster_id in in_subset
                and counts.get(slot.cluster_id, 0) < quota
            ):
                slots.append(slot)
                counts[slot.cluster_id] = counts.get(slot.cluster_id, 0) + 1
            else:
                kept.append(slot)
        remaining = kept
        if len(slots) < page_size:
            page, remaining = fallback_fill(
                slots, remaining, in_subset, page_index, page_size
            )
        else:
            page = RecPage(page_index, slots)
        result.append(page)
    return result


def fallback_fill(
    partial: list[Slot],
    unused: list[Slot],
    in_subset: set[int],
    page_index: int,
    page_size: int = PAGE_SIZE,
) -> tuple[RecPage, list[Slot]]:
    """Complete a stuck page by relaxing constraints in order: first lift the
    per-cluster quota within the subset, then admit out-of-subset candidates
    by score. The page is flagged degraded; it stays short only when the pool
    is exhausted.
    """
    slots = list(partial)
    kept: list[Slot] = []
    for slot in unused:
        if len(slots) < page_size and slot.cluster_id in in_subset:
            slots.append(slot)
        else:
            kept.append(slot)

    still: list[Slot] = []
    for slot in kept:
        if len(slots) < page_size:
            slots.append(slot)
        else:
            still.append(slot)

    return RecPage(page_index, slots, degraded=True), still


def rerank_response(
    model: ClusterModel,
    candidates: Sequence[ScoredCandidate],
    level: int,
    pages: int = PAGES_PER_RESPONSE,
    page_size: int = PAGE_SIZE,
) -> list[RecPage]:
    """Subset selection plus page construction in one call (the serving path)."""
    subset = select_cluster_subset(model, level)
    return rerank_pages(candidates, subset, level, model.assignment, pages, page_size)
