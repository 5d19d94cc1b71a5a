"""Seeded synthetic corpora: planted-cluster genome vectors and preference-
structured ratings. Used by the simulator CLI, the demos, and the test suite
to stand in for production data at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import GENOME_DIM, Corpus, Genome, Movie, RatingEvent, TagLabel


@dataclass
class PlantedGenome:
    genome: Genome
    planted_labels: dict[int, int]  # movie_id -> planted cluster
    centers: np.ndarray


def make_genome(
    n_movies: int,
    n_clusters: int = 24,
    dim: int = GENOME_DIM,
    noise: float = 0.04,
    seed: int = 0,
    first_movie_id: int = 1,
) -> PlantedGenome:
    """Genome vectors drawn around `n_clusters` well-separated planted centers.

    Entries stay in [0, 1]; cluster sizes are as equal as the division allows.
    """
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.05, 0.95, size=(n_clusters, dim))
    movie_ids = list(range(first_movie_id, first_movie_id + n_movies))
    labels = {m: i % n_clusters for i, m in enumerate(movie_ids)}
    rows = np.empty((n_movies, dim))
    for i, movie_id in enumerate(movie_ids):
        rows[i] = centers[labels[movie_id]] + rng.normal(0.0, noise, size=dim)
    np.clip(rows, 0.0, 1.0, out=rows)
    tags = [TagLabel(i, f"trait_{i:04d}") for i in range(dim)]
    return PlantedGenome(Genome(movie_ids, rows, tags), labels, centers)


def make_ratings(
    planted: PlantedGenome,
    n_users: int,
    ratings_per_user: int = 40,
    seed: int = 0,
    start_timestamp: int = 1_600_000_000,
) -> list[RatingEvent]:
    """Preference-structured ratings: each user favors a few planted clusters.

    Users rate a seeded random sample of movies; ratings sit on the half-star
    grid and skew higher inside the user's favored clusters.
    """
    rng = np.random.default_rng(seed)
    movie_ids = planted.genome.movie_ids
    n_clusters = planted.centers.shape[0]
    events: list[RatingEvent] = []
    ts = start_timestamp
    for user_id in range(1, n_users + 1):
        favored = set(rng.choice(n_clusters, size=min(3, n_clusters), replace=False).tolist())
        count = min(ratings_per_user, len(movie_ids))
        chosen = np.sort(rng.choice(len(movie_ids), size=count, replace=False))
        for idx in chosen:
            movie_id = movie_ids[int(idx)]
            base = 4.1 if planted.planted_labels[movie_id] in favored else 2.9
            value = float(np.clip(np.round((base + rng.normal(0.0, 0.7)) * 2.0) / 2.0, 0.5, 5.0))
            events.append(RatingEvent(user_id, movie_id, value, ts))
            ts += 1
    return events


def make_corpus(
    n_movies: int = 200,
    n_users: int = 60,
    n_clusters: int = 24,
    ratings_per_user: int = 40,
    dim: int = GENOME_DIM,
    noise: float = 0.04,
    seed: int = 0,
) -> tuple[Corpus, PlantedGenome]:
    """A complete in-memory corpus (movies, ratings, genome) with planted structure."""
    planted = make_genome(n_movies, n_clusters=n_clusters, dim=dim, noise=noise, seed=seed)
    ratings = make_ratings(planted, n_users, ratings_per_user=ratings_per_user, seed=seed + 1)
    movies = {
        m: Movie(m, f"Synthetic Feature #{m:05d} (2000)", 2000)
        for m in planted.genome.movie_ids
    }
    corpus = Corpus(movies=movies, ratings=ratings, genome=planted.genome)
    return corpus, planted
