"""The correlation-distance diversity metric, per-user history diversity,
and the median split into Diverse / NonDiverse cohorts."""

import numpy as np

from broadrec import (
    history_diversity_scores,
    list_diversity,
    pearson_distance,
    split_cohorts,
)
from broadrec.synth import make_corpus

rng = np.random.default_rng(0)
a = rng.uniform(size=32)
print("pairwise correlation distance (1 - r):")
print(f"  identical vectors      -> {pearson_distance(a, a):.3f}")
print(f"  anti-correlated        -> {pearson_distance(a, -a):.3f}")
print(f"  independent random     -> {pearson_distance(a, rng.uniform(size=32)):.3f}")

tight = np.tile(a, (6, 1)) + rng.normal(0, 0.01, (6, 32))
spread = rng.uniform(size=(6, 32))
print("\nlist diversity (average over all pairs):")
print(f"  six near-duplicates    -> {list_diversity(tight):.3f}")
print(f"  six independent draws  -> {list_diversity(spread):.3f}")

corpus, _ = make_corpus(n_movies=200, n_users=60, ratings_per_user=35, dim=64, seed=9)
scores = history_diversity_scores(corpus.ratings, corpus.genome)
split = split_cohorts(scores)
values = sorted(scores.values())
print(f"\nhistory diversity over {len(scores)} users:")
print(f"  min {values[0]:.3f}, median {split.threshold:.3f}, max {values[-1]:.3f}")
print(f"  cohort sizes: {len(split.diverse)} diverse / {len(split.nondiverse)} non-diverse")
most = max(scores, key=scores.get)
least = min(scores, key=scores.get)
print(f"  most diverse user {most} ({scores[most]:.3f}), least {least} ({scores[least]:.3f})")
