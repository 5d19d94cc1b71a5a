"""Re-rank one user's candidate pool at every diversity level and watch the
page composition change: more clusters, higher intra-list diversity."""

from broadrec import (
    kmeans,
    list_diversity,
    max_per_cluster,
    rerank_response,
    select_cluster_subset,
    subset_size,
    top_n,
    train_funk_svd,
)
from broadrec.synth import make_corpus

corpus, _ = make_corpus(
    n_movies=600, n_users=50, n_clusters=24, ratings_per_user=40, dim=128, seed=2
)
clusters = kmeans(corpus.genome, k=24, seed=2, ratings=corpus.ratings, n_init=3)
model = train_funk_svd(corpus.ratings, features=10, epochs_per_feature=30, seed=2)

user = 11
pool = top_n(
    model, user, 600,
    exclude=corpus.user_rated_movie_ids(user),
    candidates=corpus.genome.movie_ids,
).items
print(f"candidate pool for user {user}: {len(pool)} movies, "
      f"scores {pool[-1].score:.2f}..{pool[0].score:.2f}")

print("\nlevel -> subset size, per-page quota, page-1 clusters, page-1 diversity")
for level in (1, 2, 3, 4, 5):
    subset = select_cluster_subset(clusters, level)
    pages = rerank_response(clusters, pool, level)
    page1 = pages[0]
    used = {s.cluster_id for s in page1.slots}
    diversity = list_diversity(corpus.genome.vectors([s.movie_id for s in page1.slots]))
    print(
        f"  level {level}: subset {subset_size(level):2d} clusters, "
        f"quota {max_per_cluster(level)}, page 1 uses {len(used):2d} clusters, "
        f"diversity {diversity:.3f}"
    )

print("\nat level 5 every page holds exactly one movie per cluster:")
for page in rerank_response(clusters, pool, 5):
    clusters_used = sorted({s.cluster_id for s in page.slots})
    print(f"  page {page.page_index}: {len(page.slots)} slots, "
          f"{len(clusters_used)} distinct clusters, degraded={page.degraded}")

print("\nsubsets nest: each level's clusters are a prefix of the next level's")
for level in (1, 2, 3):
    ids = select_cluster_subset(clusters, level).cluster_ids
    print(f"  level {level}: {ids}")
