"""K-means over genome vectors (default k=24) plus cluster inspection helpers.

Clustering runs in squared-Euclidean space with k-means++ seeding and Lloyd
iterations; correlation distance is used only downstream when comparing
cluster centers for subset selection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .corpus import Genome, RatingEvent, TagLabel
from .diversity import pearson_distance


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, dim)
    assignment: dict[int, int]  # movie_id -> cluster_id
    rating_count: np.ndarray  # per-cluster total ratings of member movies
    objective_history: list[float] = field(default_factory=list)
    n_iter: int = 0
    tags: list[TagLabel] | None = None

    def members(self, cluster_id: int) -> list[int]:
        return sorted(m for m, c in self.assignment.items() if c == cluster_id)

    def sizes(self) -> np.ndarray:
        counts = np.zeros(self.k, dtype=np.int64)
        for c in self.assignment.values():
            counts[c] += 1
        return counts


def _squared_distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(n, k) squared Euclidean distances, clipped at zero against roundoff."""
    sq = (
        np.einsum("ij,ij->i", X, X)[:, None]
        - 2.0 * X @ centroids.T
        + np.einsum("ij,ij->i", centroids, centroids)[None, :]
    )
    return np.maximum(sq, 0.0)


def _kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = X[first]
    closest = _squared_distances(X, centroids[:1]).ravel()
    for i in range(1, k):
        total = closest.sum()
        if total == 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[i] = X[idx]
        closest = np.minimum(closest, _squared_distances(X, centroids[i : i + 1]).ravel())
    return centroids


def lloyd_kmeans(
    X: np.ndarray, k: int, max_iters: int = 300, seed: int = 0, n_init: int = 1
) -> tuple[np.ndarray, np.ndarray, list[float], int]:
    """Plain Lloyd k-means; returns (centroids, labels, objective history, iters).

    Deterministic for a fixed seed. With n_init > 1, the best of several
    k-means++ restarts (by final objective) is kept. Empty clusters are
    repaired by donating the point currently farthest from its assigned
    centroid.
    """
    if n_init > 1:
        best = None
        for restart in range(n_init):
            result = lloyd_kmeans(X, k, max_iters=max_iters, seed=seed + restart)
            if best is None or result[2][-1] < best[2][-1]:
                best = result
        return best

    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < k:
        raise ValueError(f"need at least k={k} vectors, got {n}")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_plusplus(X, k, rng)

    labels = np.full(n, -1, dtype=np.int64)
    history: list[float] = []
    iteration = 0
    for iteration in range(1, max_iters + 1):
        sq = _squared_distances(X, centroids)
        new_labels = np.argmin(sq, axis=1)

        # Repair empty clusters with the farthest-from-centroid points. Donors
        # come only from clusters with >= 2 members (one must exist whenever a
        # cluster is empty), so a donation never empties another cluster.
        point_dist = sq[np.arange(n), new_labels]
        counts = np.bincount(new_labels, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            eligible = counts[new_labels] >= 2
            donor = int(np.argmax(np.where(eligible, point_dist, -1.0)))
            counts[new_labels[donor]] -= 1
            new_labels[donor] = empty
            counts[empty] += 1
            point_dist[donor] = 0.0

        converged = bool(np.array_equal(new_labels, labels))
        labels = new_labels
        for c in range(k):
            members = labels == c
            centroids[c] = X[members].mean(axis=0)

        history.append(float(_squared_distances(X, centroids)[np.arange(n), labels].sum()))
        if converged:
            break
    return centroids, labels, history, iteration


def kmeans(
    vectors: Genome | Mapping[int, np.ndarray],
    k: int = 24,
    max_iters: int = 300,
    seed: int = 0,
    ratings: Iterable[RatingEvent] = (),
    n_init: int = 1,
) -> ClusterModel:
    """Cluster movie vectors and attach per-cluster rating counts.

    Accepts a Genome or any movie_id -> vector mapping. Rating counts come
    from `ratings` (zero for clusters whose members were never rated).
    """
    if isinstance(vectors, Genome):
        movie_ids = list(vectors.movie_ids)
        X = vectors.matrix
        tags = vectors.tags
    else:
        movie_ids = sorted(vectors)
        X = np.vstack([vectors[m] for m in movie_ids])
        tags = None

    centroids, labels, history, n_iter = lloyd_kmeans(
        X, k, max_iters=max_iters, seed=seed, n_init=n_init
    )
    assignment = {m: int(c) for m, c in zip(movie_ids, labels)}

    rating_count = np.zeros(k, dtype=np.int64)
    for ev in ratings:
        cluster = assignment.get(ev.movie_id)
        if cluster is not None:
            rating_count[cluster] += 1

    return ClusterModel(
        k=k,
        centroids=centroids,
        assignment=assignment,
        rating_count=rating_count,
        objective_history=history,
        n_iter=n_iter,
        tags=tags,
    )


def top_tags(model: ClusterModel, cluster_id: int, n: int = 10) -> list[TagLabel]:
    """The `n` tags with the highest centroid relevance, ties by ascending id."""
    if not 0 <= cluster_id < model.k:
        raise ValueError(f"cluster_id out of range: {cluster_id}")
    centroid = model.centroids[cluster_id]
    tags = model.tags or [TagLabel(i, f"tag_{i}") for i in range(centroid.shape[0])]
    order = sorted(range(len(tags)), key=lambda i: (-centroid[i], i))
    return [tags[i] for i in order[: min(n, len(tags))]]


def cluster_pairwise_distance(model: ClusterModel, c1: int, c2: int) -> float:
    """Correlation distance between two cluster centers."""
    for c in (c1, c2):
        if not 0 <= c < model.k:
            raise ValueError(f"cluster_id out of range: {c}")
    if c1 == c2:
        return 0.0
    return pearson_distance(model.centroids[c1], model.centroids[c2])
