"""Model persistence: each trained model saves as a directory holding a
self-describing `model.json` (with a schema_version field) plus one .npy file
per array. The byte content is a pure function of the model, so content
hashes are reproducible across identical runs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .clustering import ClusterModel
from .corpus import TagLabel
from .recommenders import FactorModel, ItemSimilarityModel, PopularityModel

SCHEMA_VERSION = 1


def _write_meta(directory: Path, kind: str, meta: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, "kind": kind, **meta}
    (directory / "model.json").write_text(json.dumps(payload, sort_keys=True, indent=1))


def _read_meta(directory: Path) -> dict:
    payload = json.loads((directory / "model.json").read_text())
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema version: {payload.get('schema_version')}")
    return payload


def save_model(
    model: PopularityModel | ItemSimilarityModel | FactorModel | ClusterModel,
    directory: str | Path,
) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def put(name: str, array) -> None:
        np.save(directory / f"{name}.npy", np.asarray(array))

    if isinstance(model, PopularityModel):
        movie_ids = sorted(model.movie_means)
        put("movie_ids", np.array(movie_ids, dtype=np.int64))
        put("means", np.array([model.movie_means[m] for m in movie_ids]))
        put("counts", np.array([model.movie_counts[m] for m in movie_ids], dtype=np.int64))
        _write_meta(directory, "popularity", {"global_mean": model.global_mean})

    elif isinstance(model, ItemSimilarityModel):
        src, dst, sims = [], [], []
        for movie_id in sorted(model.neighbors):
            for neighbor_id, sim in model.neighbors[movie_id]:
                src.append(movie_id)
                dst.append(neighbor_id)
                sims.append(sim)
        put("neighbor_src", np.array(src, dtype=np.int64))
        put("neighbor_dst", np.array(dst, dtype=np.int64))
        put("neighbor_sim", np.array(sims))
        users, movies, values = [], [], []
        for user_id in sorted(model.user_ratings):
            for movie_id in sorted(model.user_ratings[user_id]):
                users.append(user_id)
                movies.append(movie_id)
                values.append(model.user_ratings[user_id][movie_id])
        put("rating_user", np.array(users, dtype=np.int64))
        put("rating_movie", np.array(movies, dtype=np.int64))
        put("rating_value", np.array(values))
        movie_ids = sorted(model.movie_means)
        put("movie_ids", np.array(movie_ids, dtype=np.int64))
        put("movie_means", np.array([model.movie_means[m] for m in movie_ids]))
        _write_meta(
            directory,
            "item_item",
            {"neighborhood_size": model.neighborhood_size, "global_mean": model.global_mean},
        )

    elif isinstance(model, FactorModel):
        user_ids = sorted(model.user_index, key=model.user_index.get)
        movie_ids = sorted(model.movie_index, key=model.movie_index.get)
        put("user_ids", np.array(user_ids, dtype=np.int64))
        put("movie_ids", np.array(movie_ids, dtype=np.int64))
        put("user_factors", model.user_factors)
        put("item_factors", model.item_factors)
        put("user_bias", model.user_bias)
        put("item_bias", model.item_bias)
        _write_meta(
            directory, "factor", {"global_mean": model.global_mean, "params": model.params}
        )

    elif isinstance(model, ClusterModel):
        movie_ids = sorted(model.assignment)
        put("centroids", model.centroids)
        put("movie_ids", np.array(movie_ids, dtype=np.int64))
        put("labels", np.array([model.assignment[m] for m in movie_ids], dtype=np.int64))
        put("rating_count", model.rating_count)
        put("objective_history", np.array(model.objective_history))
        meta = {"k": model.k, "n_iter": model.n_iter}
        if model.tags is not None:
            meta["tags"] = [t.name for t in model.tags]
        _write_meta(directory, "cluster", meta)

    else:
        raise TypeError(f"cannot save model of type {type(model).__name__}")


def load_model(directory: str | Path):
    directory = Path(directory)
    meta = _read_meta(directory)
    kind = meta["kind"]

    def get(name: str) -> np.ndarray:
        return np.load(directory / f"{name}.npy")

    if kind == "popularity":
        movie_ids = get("movie_ids").tolist()
        means = get("means").tolist()
        counts = get("counts").tolist()
        return PopularityModel(
            movie_means=dict(zip(movie_ids, means)),
            movie_counts=dict(zip(movie_ids, counts)),
            global_mean=meta["global_mean"],
        )

    if kind == "item_item":
        neighbors: dict[int, list[tuple[int, float]]] = {}
        for s, d, v in zip(
            get("neighbor_src").tolist(), get("neighbor_dst").tolist(), get("neighbor_sim").tolist()
        ):
            neighbors.setdefault(s, []).append((d, v))
        for sims in neighbors.values():
            sims.sort(key=lambda pair: (-pair[1], pair[0]))
        user_ratings: dict[int, dict[int, float]] = {}
        for u, m, v in zip(
            get("rating_user").tolist(), get("rating_movie").tolist(), get("rating_value").tolist()
        ):
            user_ratings.setdefault(u, {})[m] = v
        user_means = {u: sum(r.values()) / len(r) for u, r in user_ratings.items()}
        movie_ids = get("movie_ids").tolist()
        movie_means = dict(zip(movie_ids, get("movie_means").tolist()))
        return ItemSimilarityModel(
            neighbors=neighbors,
            neighborhood_size=meta["neighborhood_size"],
            user_means=user_means,
            user_ratings=user_ratings,
            movie_means=movie_means,
            global_mean=meta["global_mean"],
        )

    if kind == "factor":
        user_ids = get("user_ids").tolist()
        movie_ids = get("movie_ids").tolist()
        return FactorModel(
            user_index={u: i for i, u in enumerate(user_ids)},
            movie_index={m: i for i, m in enumerate(movie_ids)},
            user_factors=get("user_factors"),
            item_factors=get("item_factors"),
            user_bias=get("user_bias"),
            item_bias=get("item_bias"),
            global_mean=meta["global_mean"],
            params=meta.get("params", {}),
        )

    if kind == "cluster":
        movie_ids = get("movie_ids").tolist()
        labels = get("labels").tolist()
        tags = None
        if "tags" in meta:
            tags = [TagLabel(i, name) for i, name in enumerate(meta["tags"])]
        return ClusterModel(
            k=meta["k"],
            centroids=get("centroids"),
            assignment=dict(zip(movie_ids, labels)),
            rating_count=get("rating_count"),
            objective_history=get("objective_history").tolist(),
            n_iter=meta["n_iter"],
            tags=tags,
        )

    raise ValueError(f"unknown model kind: {kind}")
