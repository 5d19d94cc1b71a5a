"""broadrec: a diversity-controllable movie recommender platform.

Core pieces: MovieLens-style corpus ingestion, three base collaborative
filtering recommenders, correlation-distance list diversity, k-means movie
clustering, level-controlled greedy re-ranking, a factorial experiment
harness with event logging and metrics, a statistical analysis battery, and
an HTTP serving facade.
"""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    CorpusFormatError,
    Genome,
    Movie,
    RatingEvent,
    TagLabel,
    corpus_summary,
    load_corpus,
    load_genome,
    load_movies,
    load_ratings,
    write_corpus,
)
from .diversity import (
    CohortSplit,
    ZeroVarianceWarning,
    history_diversity_scores,
    list_diversity,
    pearson_distance,
    split_cohorts,
    user_history_diversity,
)
from .recommenders import (
    FactorModel,
    ItemSimilarityModel,
    PopularityModel,
    Prediction,
    ScoredCandidate,
    TopN,
    TrainingDivergedError,
    predict,
    top_n,
    train_funk_svd,
    train_item_item,
    train_popularity,
)
from .clustering import ClusterModel, cluster_pairwise_distance, kmeans, top_tags
from .rerank import (
    ClusterSubset,
    RecPage,
    Slot,
    fallback_fill,
    greedy_cluster_order,
    max_per_cluster,
    rerank_pages,
    rerank_response,
    select_cluster_subset,
    subset_size,
)
from .experiment import (
    ALL_ARMS,
    Arm,
    ArmBehavior,
    Cohort,
    InteractionEvent,
    MetricsRecord,
    Session,
    SimConfig,
    SimulationResult,
    Treatment,
    Window,
    assign_arm,
    compute_metrics,
    read_event_log,
    sessionize,
    simulate_users,
    write_event_log,
)
from .stats import (
    ComparisonRow,
    ConvergenceError,
    ExperimentReport,
    OlrFit,
    TestResult,
    analyze_experiment,
    cohens_d,
    fit_olr,
    likert_bin,
    one_way_anova,
    welch_t,
)
from .store import load_model, save_model
