"""Base personalized recommenders producing the scored candidate pools that
get re-ranked: a popularity mean model, item-item CF with cosine similarity
over user-mean-centered co-ratings, and feature-sequential biased matrix
factorization trained by SGD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .corpus import RatingEvent

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn


RATING_MIN = 0.5
RATING_MAX = 5.0

DEFAULT_FEATURES = 50
DEFAULT_EPOCHS_PER_FEATURE = 125
DEFAULT_LEARNING_RATE = 0.005
DEFAULT_REGULARIZATION = 0.02
DEFAULT_NEIGHBORHOOD = 50


class TrainingDivergedError(RuntimeError):
    """SGD produced a non-finite parameter; training aborted."""


class Prediction(NamedTuple):
    score: float
    fallback: bool  # True when a non-personalized fallback path was used


class ScoredCandidate(NamedTuple):
    movie_id: int
    score: float


class TopN(NamedTuple):
    items: list[ScoredCandidate]
    exhausted: bool  # True when fewer eligible movies than requested


def clamp_rating(value: float) -> float:
    return min(RATING_MAX, max(RATING_MIN, value))


# --------------------------------------------------------------------------
# Popularity
# --------------------------------------------------------------------------

@dataclass
class PopularityModel:
    movie_means: dict[int, float]
    movie_counts: dict[int, int]
    global_mean: float

    kind = "popularity"

    def predict(self, user_id: int, movie_id: int) -> Prediction:
        mean = self.movie_means.get(movie_id)
        if mean is None:
            return Prediction(self.global_mean, True)
        return Prediction(mean, False)

    def known_movies(self) -> set[int]:
        return set(self.movie_means)

    def rated_by(self, user_id: int) -> set[int]:
        return set()


def train_popularity(ratings: Sequence[RatingEvent]) -> PopularityModel:
    if not ratings:
        raise ValueError("cannot train on an empty corpus")
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    for ev in ratings:
        sums[ev.movie_id] = sums.get(ev.movie_id, 0.0) + ev.rating
        counts[ev.movie_id] = counts.get(ev.movie_id, 0) + 1
    means = {m: sums[m] / counts[m] for m in sums}
    global_mean = sum(ev.rating for ev in ratings) / len(ratings)
    return PopularityModel(movie_means=means, movie_counts=counts, global_mean=global_mean)


# --------------------------------------------------------------------------
# Item-item CF
# --------------------------------------------------------------------------

@dataclass
class ItemSimilarityModel:
    neighbors: dict[int, list[tuple[int, float]]]  # movie -> [(movie, sim)] truncated
    neighborhood_size: int
    user_means: dict[int, float]
    user_ratings: dict[int, dict[int, float]]  # user -> {movie: rating}
    movie_means: dict[int, float]
    global_mean: float

    kind = "item_item"

    def predict(self, user_id: int, movie_id: int) -> Prediction:
        rated = self.user_ratings.get(user_id)
        if rated is None:
            # Non-personalized fallback for unknown users.
            return Prediction(self.movie_means.get(movie_id, self.global_mean), True)
        if movie_id not in self.movie_means:
            return Prediction(self.user_means[user_id], True)
        num = 0.0
        den = 0.0
        for neighbor_id, sim in self.neighbors.get(movie_id, ()):
            rating = rated.get(neighbor_id)
            if rating is not None:
                num += sim * rating
                den += abs(sim)
        if den == 0.0:
            return Prediction(self.user_means[user_id], False)
        return Prediction(clamp_rating(num / den), False)

    def known_movies(self) -> set[int]:
        return set(self.movie_means)

    def rated_by(self, user_id: int) -> set[int]:
        return set(self.user_ratings.get(user_id, ()))


def train_item_item(
    ratings: Sequence[RatingEvent], neighborhood_size: int = DEFAULT_NEIGHBORHOOD
) -> ItemSimilarityModel:
    """Cosine similarity between movies over user-mean-centered co-ratings,
    truncated to the top `neighborhood_size` neighbors per movie.
    """
    if not ratings:
        raise ValueError("cannot train on an empty corpus")

    user_ratings: dict[int, dict[int, float]] = {}
    for ev in ratings:
        user_ratings.setdefault(ev.user_id, {})[ev.movie_id] = ev.rating
    user_means = {u: sum(r.values()) / len(r) for u, r in user_ratings.items()}

    # Accumulate, per unordered movie pair, the co-rater dot product and the
    # co-rater-restricted squared norms of each side.
    dots: dict[tuple[int, int], float] = {}
    norm_a: dict[tuple[int, int], float] = {}
    norm_b: dict[tuple[int, int], float] = {}
    for user_id, rated in user_ratings.items():
        mean = user_means[user_id]
        movies = sorted(rated)
        centered = [rated[m] - mean for m in movies]
        for i in range(len(movies)):
            ci = centered[i]
            for j in range(i + 1, len(movies)):
                key = (movies[i], movies[j])
                cj = centered[j]
                dots[key] = dots.get(key, 0.0) + ci * cj
                norm_a[key] = norm_a.get(key, 0.0) + ci * ci
                norm_b[key] = norm_b.get(key, 0.0) + cj * cj

    all_sims: dict[int, list[tuple[int, float]]] = {}
    for (a, b), dot in dots.items():
        na = math.sqrt(norm_a[(a, b)])
        nb = math.sqrt(norm_b[(a, b)])
        if na == 0.0 or nb == 0.0:
            continue
        sim = dot / (na * nb)
        all_sims.setdefault(a, []).append((b, sim))
        all_sims.setdefault(b, []).append((a, sim))

    neighbors: dict[int, list[tuple[int, float]]] = {}
    for movie_id, sims in all_sims.items():
        sims.sort(key=lambda pair: (-pair[1], pair[0]))
        neighbors[movie_id] = sims[:neighborhood_size]

    movie_sums: dict[int, float] = {}
    movie_counts: dict[int, int] = {}
    for ev in ratings:
        movie_sums[ev.movie_id] = movie_sums.get(ev.movie_id, 0.0) + ev.rating
        movie_counts[ev.movie_id] = movie_counts.get(ev.movie_id, 0) + 1
    movie_means = {m: movie_sums[m] / movie_counts[m] for m in movie_sums}
    global_mean = sum(ev.rating for ev in ratings) / len(ratings)

    return ItemSimilarityModel(
        neighbors=neighbors,
        neighborhood_size=neighborhood_size,
        user_means=user_means,
        user_ratings=user_ratings,
        movie_means=movie_means,
        global_mean=global_mean,
    )


# --------------------------------------------------------------------------
# Feature-sequential biased matrix factorization (SGD)
# --------------------------------------------------------------------------

@njit(cache=True)
def _feature_pass(user_idx, movie_idx, residual, pu, qi, bu, bi, lr, reg, epochs):
    """One feature's SGD training: `epochs` sequential passes over the ratings.

    `residual` already excludes the global mean and all previously trained
    features; biases are live and updated here alongside the feature.
    """
    n = user_idx.shape[0]
    for _ in range(epochs):
        for k in range(n):
            u = user_idx[k]
            m = movie_idx[k]
            err = residual[k] - bu[u] - bi[m] - pu[u] * qi[m]
            pu_old = pu[u]
            bu[u] += lr * (err - reg * bu[u])
            bi[m] += lr * (err - reg * bi[m])
            pu[u] += lr * (err * qi[m] - reg * pu_old)
            qi[m] += lr * (err * pu_old - reg * qi[m])


@dataclass
class FactorModel:
    user_index: dict[int, int]
    movie_index: dict[int, int]
    user_factors: np.ndarray  # (n_users, features)
    item_factors: np.ndarray  # (n_movies, features)
    user_bias: np.ndarray
    item_bias: np.ndarray
    global_mean: float
    params: dict = field(default_factory=dict)
    loss_history: list[list[float]] | None = None  # per feature, per epoch

    kind = "factor"

    def predict(self, user_id: int, movie_id: int) -> Prediction:
        u = self.user_index.get(user_id)
        m = self.movie_index.get(movie_id)
        if u is None and m is None:
            return Prediction(clamp_rating(self.global_mean), True)
        if u is None:
            return Prediction(clamp_rating(self.global_mean + self.item_bias[m]), True)
        if m is None:
            return Prediction(clamp_rating(self.global_mean + self.user_bias[u]), True)
        raw = (
            self.global_mean
            + self.user_bias[u]
            + self.item_bias[m]
            + float(self.user_factors[u] @ self.item_factors[m])
        )
        return Prediction(clamp_rating(raw), False)

    def score_movies(self, user_id: int, movie_ids: Sequence[int]) -> np.ndarray:
        """Vectorized prediction for one user over many movies."""
        u = self.user_index.get(user_id)
        rows = np.array([self.movie_index.get(m, -1) for m in movie_ids])
        known = rows >= 0
        scores = np.full(len(rows), self.global_mean)
        if u is not None:
            scores += self.user_bias[u]
            if known.any():
                scores[known] += self.item_bias[rows[known]]
                scores[known] += self.item_factors[rows[known]] @ self.user_factors[u]
        else:
            if known.any():
                scores[known] += self.item_bias[rows[known]]
        return np.clip(scores, RATING_MIN, RATING_MAX)

    def known_movies(self) -> set[int]:
        return set(self.movie_index)

    def rated_by(self, user_id: int) -> set[int]:
        return set()


def train_funk_svd(
    ratings: Sequence[RatingEvent],
    features: int = DEFAULT_FEATURES,
    epochs_per_feature: int = DEFAULT_EPOCHS_PER_FEATURE,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    regularization: float = DEFAULT_REGULARIZATION,
    seed: int = 0,
    track_loss: bool = False,
) -> FactorModel:
    """Biased matrix factorization trained one feature at a time.

    Each feature runs exactly `epochs_per_feature` sequential SGD passes over
    the ratings (fixed seeded order), then its contribution is folded into the
    residuals before the next feature starts. Deterministic for a fixed seed.
    """
    if not ratings:
        raise ValueError("cannot train on an empty corpus")

    user_ids = sorted({ev.user_id for ev in ratings})
    movie_ids = sorted({ev.movie_id for ev in ratings})
    user_index = {u: i for i, u in enumerate(user_ids)}
    movie_index = {m: i for i, m in enumerate(movie_ids)}

    user_idx = np.array([user_index[ev.user_id] for ev in ratings], dtype=np.int64)
    movie_idx = np.array([movie_index[ev.movie_id] for ev in ratings], dtype=np.int64)
    values = np.array([ev.rating for ev in ratings], dtype=np.float64)

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ratings))
    user_idx, movie_idx, values = user_idx[order], movie_idx[order], values[order]

    global_mean = float(values.mean())
    residual = values - global_mean

    n_users, n_movies = len(user_ids), len(movie_ids)
    # Init near Funk's 0.1 constant; the noise breaks symmetry deterministically.
    user_factors = rng.normal(0.1, 0.01, size=(n_users, features))
    item_factors = rng.normal(0.1, 0.01, size=(n_movies, features))
    user_bias = np.zeros(n_users)
    item_bias = np.zeros(n_movies)

    loss_history: list[list[float]] | None = [] if track_loss else None

    for f in range(features):
        pu = user_factors[:, f].copy()
        qi = item_factors[:, f].copy()
        if track_loss:
            epoch_losses = []
            for _ in range(epochs_per_feature):
                _feature_pass(user_idx, movie_idx, residual, pu, qi, user_bias, item_bias,
                              learning_rate, regularization, 1)
                err = residual - user_bias[user_idx] - item_bias[movie_idx] - pu[user_idx] * qi[movie_idx]
                epoch_losses.append(float(np.mean(err * err)))
            loss_history.append(epoch_losses)
        else:
            _feature_pass(user_idx, movie_idx, residual, pu, qi, user_bias, item_bias,
                          learning_rate, regularization, epochs_per_feature)
        if not (np.isfinite(pu).all() and np.isfinite(qi).all()
                and np.isfinite(user_bias).all() and np.isfinite(item_bias).all()):
            raise TrainingDivergedError(
                f"non-finite parameters after feature {f}; "
                f"lower the learning rate (lr={learning_rate}, reg={regularization})"
            )
        user_factors[:, f] = pu
        item_factors[:, f] = qi
        residual -= pu[user_idx] * qi[movie_idx]

    return FactorModel(
        user_index=user_index,
        movie_index=movie_index,
        user_factors=user_factors,
        item_factors=item_factors,
        user_bias=user_bias,
        item_bias=item_bias,
        global_mean=global_mean,
        params={
            "features": features,
            "epochs_per_feature": epochs_per_feature,
            "learning_rate": learning_rate,
            "regularization": regularization,
            "seed": seed,
        },
        loss_history=loss_history,
    )


# --------------------------------------------------------------------------
# Shared prediction / ranking surface
# --------------------------------------------------------------------------

Model = PopularityModel | ItemSimilarityModel | FactorModel


def predict(model: Model, user_id: int, movie_id: int) -> Prediction:
    return model.predict(user_id, movie_id)


def top_n(
    model: Model,
    user_id: int,
    n: int,
    exclude: Iterable[int] = (),
    candidates: Iterable[int] | None = None,
) -> TopN:
    """The `n` best-scoring candidate movies for a user, excluding `exclude`
    (typically the user's rated movies), sorted by score descending with ties
    broken by ascending movie id.

    `candidates` restricts the eligible universe (callers pass the
    genome-backed movie ids so every candidate can be clustered); defaults to
    all movies known to the model. Returns a short list flagged `exhausted`
    when fewer than `n` movies are eligible.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    excluded = set(exclude) | model.rated_by(user_id)
    pool = sorted(candidates) if candidates is not None else sorted(model.known_movies())
    eligible = [m for m in pool if m not in excluded]

    if isinstance(model, FactorModel):
        scores = model.score_movies(user_id, eligible)
        scored = [ScoredCandidate(m, float(s)) for m, s in zip(eligible, scores)]
    else:
        scored = [ScoredCandidate(m, model.predict(user_id, m).score) for m in eligible]

    scored.sort(key=lambda c: (-c.score, c.movie_id))
    return TopN(items=scored[:n], exhausted=len(scored) < n)
