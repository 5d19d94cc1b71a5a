"""Cluster the tag vectors with k-means and inspect what each cluster is
about via its highest-relevance tags."""

import numpy as np

from broadrec import cluster_pairwise_distance, kmeans, top_tags
from broadrec.synth import make_corpus

corpus, planted = make_corpus(
    n_movies=480, n_users=50, n_clusters=24, ratings_per_user=40, dim=256, seed=21
)
model = kmeans(corpus.genome, k=24, seed=4, ratings=corpus.ratings, n_init=3)

sizes = model.sizes()
print(f"k={model.k}, converged in {model.n_iter} iterations")
print(f"cluster sizes: min {sizes.min()}, max {sizes.max()}")
print(f"objective trace: {['%.0f' % v for v in model.objective_history]}")

# Recovery check against the generator's planted labels: one planted cluster
# should dominate each found cluster.
purity = 0
for cluster_id in range(model.k):
    members = model.members(cluster_id)
    labels = [planted.planted_labels[m] for m in members]
    purity += max(labels.count(v) for v in set(labels))
print(f"planted-label purity: {purity}/{len(model.assignment)}")

busiest = int(np.argmax(model.rating_count))
print(f"\nmost-rated cluster is {busiest} ({int(model.rating_count[busiest])} ratings)")
print("its top tags:", ", ".join(t.name for t in top_tags(model, busiest, n=5)))

print("\ncenter-to-center correlation distances from the busiest cluster:")
distances = sorted(
    (cluster_pairwise_distance(model, busiest, other), other)
    for other in range(model.k)
    if other != busiest
)
closest = ", ".join(f"{c} ({d:.2f})" for d, c in distances[:3])
farthest = ", ".join(f"{c} ({d:.2f})" for d, c in distances[-3:])
print(f"  closest: {closest}")
print(f"  farthest: {farthest}")
