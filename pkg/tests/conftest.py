import numpy as np
import pytest

from broadrec.clustering import kmeans
from broadrec.synth import make_corpus


@pytest.fixture(scope="session")
def small_corpus():
    """Planted-cluster corpus small enough for per-test reuse (dim 64)."""
    corpus, planted = make_corpus(
        n_movies=240, n_users=40, n_clusters=24, ratings_per_user=40, dim=64, seed=7
    )
    return corpus, planted


@pytest.fixture(scope="session")
def small_clusters(small_corpus):
    corpus, _ = small_corpus
    return kmeans(corpus.genome, k=24, seed=5, ratings=corpus.ratings)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def write_ratings_csv(path, rows):
    lines = ["userId,movieId,rating,timestamp"]
    lines += [",".join(str(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_genome_csvs(dirpath, scores, n_tags=1128, tag_ids=None):
    """scores: list of (movie_id, tag_id, relevance)."""
    tag_ids = tag_ids if tag_ids is not None else list(range(1, n_tags + 1))
    tags_lines = ["tagId,tag"] + [f"{t},tag name {t}" for t in tag_ids]
    (dirpath / "genome-tags.csv").write_text("\n".join(tags_lines) + "\n")
    score_lines = ["movieId,tagId,relevance"] + [
        f"{m},{t},{r}" for (m, t, r) in scores
    ]
    (dirpath / "genome-scores.csv").write_text("\n".join(score_lines) + "\n")
