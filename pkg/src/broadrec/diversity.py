"""Intra-list diversity over tag-genome vectors and the cohort split built on it.

Diversity of a list is the average pairwise correlation distance (1 - Pearson r)
over all ordered pairs; by symmetry this equals the unordered-pair average.
Users are split into Diverse / NonDiverse halves at the median of their
historical rating diversity.
"""

from __future__ import annotations

import warnings
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .corpus import Genome, RatingEvent


class ZeroVarianceWarning(UserWarning):
    """A vector with zero variance entered a correlation distance; treated as
    uncorrelated (distance 1.0)."""


def pearson_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Correlation distance 1 - r in [0, 2].

    Zero-variance vectors have undefined correlation; such pairs get a neutral
    distance of 1.0 and raise a ZeroVarianceWarning.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size < 2:
        raise ValueError("pearson distance needs vectors of length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    na = float(np.sqrt(da @ da))
    nb = float(np.sqrt(db @ db))
    if na == 0.0 or nb == 0.0:
        warnings.warn("zero-variance vector in pearson_distance", ZeroVarianceWarning)
        return 1.0
    if np.array_equal(a, b):
        return 0.0  # r = 1 exactly, without roundoff from the norm product
    r = float(da @ db) / (na * nb)
    return 1.0 - r


def _pairwise_pearson_distances(matrix: np.ndarray) -> np.ndarray:
    """(n, n) matrix of 1 - r over rows; zero-variance rows are distance 1.0
    to every other row, except that numerically identical rows are exactly
    0 apart. The diagonal is not meaningful for callers."""
    centered = matrix - matrix.mean(axis=1, keepdims=True)
    norms = np.sqrt(np.einsum("ij,ij->i", centered, centered))
    degenerate = norms == 0.0
    safe = np.where(degenerate, 1.0, norms)
    unit = centered / safe[:, None]
    dist = 1.0 - unit @ unit.T
    if degenerate.any():
        dist[degenerate, :] = 1.0
        dist[:, degenerate] = 1.0
    _, inverse = np.unique(matrix, axis=0, return_inverse=True)
    same = inverse[:, None] == inverse[None, :]
    dist[same] = 0.0
    return dist


def list_diversity(vectors: Sequence[np.ndarray] | np.ndarray) -> float:
    """Average pairwise correlation distance over all ordered pairs of `vectors`.

    Rows are canonicalized (lexicographically sorted) before summation so the
    result is exactly invariant under reordering of the input list.
    """
    matrix = np.asarray(vectors, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("expected a list of equal-length vectors")
    n = matrix.shape[0]
    if n < 2:
        raise ValueError("diversity undefined below two items")
    order = np.lexsort(matrix.T[::-1])
    matrix = matrix[order]
    dist = _pairwise_pearson_distances(matrix)
    total = float(dist.sum() - np.trace(dist))
    return total / (n * (n - 1))


def user_history_diversity(
    user_id: int,
    ratings: Iterable[RatingEvent],
    genome: Genome,
    since: int | None = None,
) -> float | None:
    """List diversity over the genome vectors of the user's rated movies.

    Returns None when the user has fewer than two genome-backed rated movies
    (the user is then excluded from the cohort split). `since` optionally
    restricts to ratings at or after that timestamp.
    """
    movie_ids = sorted(
        {
            ev.movie_id
            for ev in ratings
            if ev.user_id == user_id
            and ev.movie_id in genome
            and (since is None or ev.timestamp >= since)
        }
    )
    if len(movie_ids) < 2:
        return None
    return list_diversity(genome.vectors(movie_ids))


def history_diversity_scores(
    ratings: Iterable[RatingEvent],
    genome: Genome,
    since: int | None = None,
) -> dict[int, float]:
    """Per-user history diversity for every user with >= 2 eligible movies."""
    by_user: dict[int, set[int]] = {}
    for ev in ratings:
        if ev.movie_id in genome and (since is None or ev.timestamp >= since):
            by_user.setdefault(ev.user_id, set()).add(ev.movie_id)
    scores: dict[int, float] = {}
    for user_id, movie_ids in sorted(by_user.items()):
        if len(movie_ids) >= 2:
            scores[user_id] = list_diversity(genome.vectors(sorted(movie_ids)))
    return scores


class CohortSplit(NamedTuple):
    diverse: set[int]
    nondiverse: set[int]
    threshold: float


def split_cohorts(scores: Mapping[int, float]) -> CohortSplit:
    """Median split into equal-sized halves (within 1).

    Users are ranked by (score, user_id) ascending; the lower half is
    NonDiverse and gets the extra user on odd counts, so ties land in
    NonDiverse first. The reported threshold is the median score.
    """
    if len(scores) < 2:
        raise ValueError("cohort split needs at least two scored users")
    ranked = sorted(scores.items(), key=lambda item: (item[1], item[0]))
    cut = (len(ranked) + 1) // 2
    nondiverse = {user_id for user_id, _ in ranked[:cut]}
    diverse = {user_id for user_id, _ in ranked[cut:]}
    threshold = float(np.median([s for _, s in ranked]))
    return CohortSplit(diverse=diverse, nondiverse=nondiverse, threshold=threshold)
