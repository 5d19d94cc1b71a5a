"""Operational entry points: ingest, train, cluster, rerank, cohorts, assign,
diversity, serve, simulate, analyze.

Every artifact-producing stage writes a manifest (inputs, parameters, seeds,
and content hashes of outputs) so identical inputs and seeds reproduce
byte-identical artifacts. Exit codes: 0 ok, 1 user error, 2 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from datetime import date, datetime, timezone
from pathlib import Path

from . import __version__
from .clustering import kmeans, top_tags
from .corpus import CorpusFormatError, load_corpus, corpus_summary
from .diversity import history_diversity_scores, split_cohorts, user_history_diversity
from .experiment import (
    ALL_ARMS,
    Arm,
    ArmBehavior,
    Cohort,
    SimConfig,
    Window,
    assign_arm,
    compute_metrics,
    read_event_log,
    simulate_users,
    write_event_log,
)
from .recommenders import top_n, train_funk_svd, train_item_item, train_popularity
from .rerank import rerank_response
from .stats import METRIC_FIELDS, analyze_experiment, fit_olr, likert_bin
from .store import load_model, save_model
from .synth import make_genome

ALGOS = ("peasant", "warrior", "wizard")

LIKERT_CODES = {"negative": 0, "neutral": 1, "positive": 2}
INTERFACE_CODES = {"Control": 0, "BRC": 1, "BRC_DS": 2}
HABIT_CODES = {"D": 1, "ND": 2}

SURVEY_METRICS = (
    "accuracy", "diversity", "novelty", "level_of_effort",
    "trustworthiness", "ease_of_use", "usage_frequency",
)


# --------------------------------------------------------------------------
# Manifest helpers
# --------------------------------------------------------------------------

def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _hash_tree(path: Path) -> dict[str, str]:
    if path.is_file():
        return {path.name: _sha256_file(path)}
    return {
        str(p.relative_to(path)): _sha256_file(p)
        for p in sorted(path.rglob("*"))
        if p.is_file() and not p.name.endswith(".manifest.json")
    }


def write_manifest(
    out_dir: Path, stage: str, inputs: dict[str, Path], params: dict, outputs: dict[str, Path]
) -> Path:
    manifest = {
        "stage": stage,
        "tool_version": __version__,
        "params": params,
        "inputs": {name: _hash_tree(Path(p)) for name, p in inputs.items()},
        "outputs": {name: _hash_tree(Path(p)) for name, p in outputs.items()},
    }
    path = out_dir / f"{stage}.manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=1))
    return path


def _parse_window(spec: str) -> Window:
    """Parse 'YYYY-MM-DD..YYYY-MM-DD' into a half-open epoch-second window."""
    try:
        start_str, end_str = spec.split("..", 1)
        start = _date_to_epoch(date.fromisoformat(start_str))
        end = _date_to_epoch(date.fromisoformat(end_str))
    except ValueError as exc:
        raise ValueError(f"bad window {spec!r}; expected YYYY-MM-DD..YYYY-MM-DD") from exc
    if end <= start:
        raise ValueError(f"window {spec!r} is empty")
    return Window(start, end)


def _date_to_epoch(d: date) -> float:
    return datetime(d.year, d.month, d.day, tzinfo=timezone.utc).timestamp()


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = load_corpus(args.data_dir)
    summary = corpus_summary(corpus)
    summary_path = out_dir / "corpus_summary.json"
    summary_path.write_text(
        json.dumps(
            {
                "user_count": summary.user_count,
                "movie_count": summary.movie_count,
                "rating_count": summary.rating_count,
                "genome_movie_count": len(corpus.genome),
                "ratings_per_user_histogram": summary.ratings_per_user,
            },
            sort_keys=True,
            indent=1,
        )
    )
    write_manifest(
        out_dir, "ingest",
        inputs={"data_dir": Path(args.data_dir)},
        params={},
        outputs={"summary": summary_path},
    )
    print(f"ingested {summary.rating_count} ratings from {summary.user_count} users "
          f"over {summary.movie_count} movies ({len(corpus.genome)} with genome vectors)")
    return 0


def _train(args, corpus):
    if args.algo == "peasant":
        return train_popularity(corpus.ratings)
    if args.algo == "warrior":
        return train_item_item(corpus.ratings, neighborhood_size=args.neighborhood_size)
    return train_funk_svd(
        corpus.ratings,
        features=args.features,
        epochs_per_feature=args.epochs_per_feature,
        learning_rate=args.learning_rate,
        regularization=args.regularization,
        seed=args.seed,
    )


def cmd_train(args) -> int:
    corpus = load_corpus(args.data_dir)
    model = _train(args, corpus)
    model_dir = Path(args.model_dir) / args.algo
    save_model(model, model_dir)
    write_manifest(
        Path(args.model_dir), f"train-{args.algo}",
        inputs={"data_dir": Path(args.data_dir)},
        params={
            "algo": args.algo, "seed": args.seed, "features": args.features,
            "epochs_per_feature": args.epochs_per_feature,
            "learning_rate": args.learning_rate, "regularization": args.regularization,
            "neighborhood_size": args.neighborhood_size,
        },
        outputs={"model": model_dir},
    )
    print(f"trained {args.algo} model -> {model_dir}")
    return 0


def cmd_cluster(args) -> int:
    corpus = load_corpus(args.data_dir)
    model = kmeans(
        corpus.genome, k=args.k, max_iters=args.max_iters, seed=args.seed,
        ratings=corpus.ratings, n_init=args.n_init,
    )
    model_dir = Path(args.model_dir) / "clusters"
    save_model(model, model_dir)
    outputs = {"model": model_dir}
    if args.report:
        report_path = Path(args.report)
        report_path.parent.mkdir(parents=True, exist_ok=True)
        lines = []
        for cluster_id in range(model.k):
            names = ", ".join(t.name for t in top_tags(model, cluster_id, n=10))
            lines.append(
                f"cluster {cluster_id:2d} (movies={int(model.sizes()[cluster_id])}, "
                f"ratings={int(model.rating_count[cluster_id])}): {names}"
            )
        report_path.write_text("\n".join(lines) + "\n")
        outputs["report"] = report_path
    write_manifest(
        Path(args.model_dir), "cluster",
        inputs={"data_dir": Path(args.data_dir)},
        params={"k": args.k, "seed": args.seed, "max_iters": args.max_iters,
                "n_init": args.n_init},
        outputs=outputs,
    )
    print(f"clustered {len(model.assignment)} movies into k={model.k} "
          f"(converged in {model.n_iter} iterations) -> {model_dir}")
    return 0


def cmd_rerank(args) -> int:
    corpus = load_corpus(args.data_dir)
    model = load_model(Path(args.model_dir) / args.algo)
    clusters = load_model(Path(args.model_dir) / "clusters")
    pool = top_n(
        model, args.user, args.pool_size,
        exclude=corpus.user_rated_movie_ids(args.user),
        candidates=corpus.genome.movie_ids,
    ).items
    if not pool:
        raise ValueError(f"no eligible candidates for user {args.user}")
    pages = rerank_response(clusters, pool, args.level)
    sink = Path(args.out).open("w", encoding="utf-8") if args.out else sys.stdout
    try:
        for page in pages:
            sink.write(json.dumps(
                {
                    "user_id": args.user,
                    "level": args.level,
                    "page_index": page.page_index,
                    "degraded": page.degraded,
                    "slots": [
                        {"movie_id": s.movie_id, "score": s.score, "cluster_id": s.cluster_id}
                        for s in page.slots
                    ],
                },
                sort_keys=True,
            ) + "\n")
    finally:
        if args.out:
            sink.close()
    return 0


def cmd_diversity(args) -> int:
    corpus = load_corpus(args.data_dir)
    score = user_history_diversity(args.user, corpus.ratings, corpus.genome, since=args.since)
    if score is None:
        print(f"user {args.user}: excluded (fewer than two genome-backed rated movies)")
    else:
        print(f"user {args.user}: history diversity {score:.6f}")
    return 0


def cmd_cohorts(args) -> int:
    corpus = load_corpus(args.data_dir)
    scores = history_diversity_scores(corpus.ratings, corpus.genome, since=args.since)
    split = split_cohorts(scores)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "score", "cohort"])
        for user_id in sorted(scores):
            cohort = "D" if user_id in split.diverse else "ND"
            writer.writerow([user_id, repr(scores[user_id]), cohort])
    write_manifest(
        out_path.parent, "cohorts",
        inputs={"data_dir": Path(args.data_dir)},
        params={"since": args.since, "threshold": split.threshold},
        outputs={"cohorts": out_path},
    )
    print(f"split {len(scores)} users: {len(split.diverse)} diverse / "
          f"{len(split.nondiverse)} non-diverse (median {split.threshold:.6f}) -> {out_path}")
    return 0


def _read_cohorts(path: Path) -> dict[int, str]:
    cohorts: dict[int, str] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            cohorts[int(row["user_id"])] = row["cohort"]
    return cohorts


def _read_arms(path: Path) -> dict[int, Arm]:
    arms: dict[int, Arm] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            arms[int(row["user_id"])] = Arm.from_label(f"{row['cohort']}-{row['treatment']}")
    return arms


def cmd_assign(args) -> int:
    cohorts = _read_cohorts(Path(args.cohorts))
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "cohort", "treatment"])
        for user_id in sorted(cohorts):
            arm = assign_arm(user_id, Cohort(cohorts[user_id]), args.seed)
            writer.writerow([user_id, arm.cohort.value, arm.treatment.value])
    write_manifest(
        out_path.parent, "assign",
        inputs={"cohorts": Path(args.cohorts)},
        params={"seed": args.seed},
        outputs={"arms": out_path},
    )
    print(f"assigned {len(cohorts)} users -> {out_path}")
    return 0


def _env_or(args_value, env_name: str, default, cast=str):
    """Precedence: explicit CLI flag > environment variable > default."""
    if args_value is not None:
        return args_value
    raw = os.environ.get(env_name)
    if raw is not None:
        return cast(raw)
    return default


def cmd_serve(args) -> int:
    import uvicorn

    from .service import RecommenderService, ServiceConfig, create_app

    file_config = {}
    if args.config:
        file_config = json.loads(Path(args.config).read_text())

    def setting(flag_value, env_name, key, default, cast):
        file_value = file_config.get(key)
        return _env_or(
            flag_value, env_name, cast(file_value) if file_value is not None else default, cast
        )

    data_dir = setting(args.data_dir, "BROADREC_DATA_DIR", "data_dir", None, str)
    model_dir = setting(args.model_dir, "BROADREC_MODEL_DIR", "model_dir", None, str)
    arms_path = setting(args.arms, "BROADREC_ARMS", "arms", None, str)
    algo = setting(args.algo, "BROADREC_ALGO", "algo", "wizard", str)
    port = setting(args.port, "BROADREC_PORT", "port", 8000, int)
    host = setting(args.host, "BROADREC_HOST", "host", "127.0.0.1", str)
    event_log = setting(args.event_log, "BROADREC_EVENT_LOG", "event_log", "events.jsonl", str)
    timeout = setting(
        args.session_timeout, "BROADREC_SESSION_TIMEOUT", "session_timeout_minutes", 30.0, float
    )
    pool_size = setting(args.pool_size, "BROADREC_POOL_SIZE", "pool_size", 600, int)
    if not data_dir or not model_dir or not arms_path:
        raise ValueError("serve needs --data-dir, --model-dir and --arms (or env/config)")

    corpus = load_corpus(data_dir)
    model = load_model(Path(model_dir) / algo)
    clusters = load_model(Path(model_dir) / "clusters")
    arms = _read_arms(Path(arms_path))
    service = RecommenderService(
        corpus=corpus,
        model=model,
        clusters=clusters,
        arms=arms,
        event_log_path=Path(event_log),
        config=ServiceConfig(session_timeout_minutes=timeout, pool_size=pool_size),
    )
    uvicorn.run(create_app(service), host=host, port=port)
    return 0


def _parse_shift(spec: str) -> tuple[str, str, float]:
    try:
        arm_label, rate, factor = spec.split(":", 2)
        return arm_label, rate, float(factor)
    except ValueError as exc:
        raise ValueError(f"bad --shift {spec!r}; expected ARM:RATE:FACTOR") from exc


def cmd_simulate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    window = _parse_window(args.window)

    planted = make_genome(args.movies, n_clusters=min(24, args.movies), seed=args.seed)
    behaviors = {arm.label: ArmBehavior() for arm in ALL_ARMS}
    for spec in args.shift or ():
        arm_label, rate, factor = _parse_shift(spec)
        if arm_label not in behaviors:
            raise ValueError(f"unknown arm {arm_label!r} in --shift")
        behaviors[arm_label] = behaviors[arm_label].scaled(**{rate: factor})
    config = SimConfig(window=window, users_per_arm=args.users_per_arm, behaviors=behaviors)
    result = simulate_users(config, planted.genome, seed=args.seed)

    events_path = out_dir / "events.jsonl"
    write_event_log(result.events, events_path)

    arms_path = out_dir / "arms.csv"
    with arms_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "cohort", "treatment"])
        for user_id in sorted(result.arms):
            arm = result.arms[user_id]
            writer.writerow([user_id, arm.cohort.value, arm.treatment.value])

    cohorts_path = out_dir / "cohorts.csv"
    with cohorts_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "score", "cohort"])
        for user_id in sorted(result.arms):
            writer.writerow([user_id, "", result.arms[user_id].cohort.value])

    truth_path = out_dir / "truth.csv"
    with truth_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id"] + list(METRIC_FIELDS))
        for user_id in sorted(result.truth):
            record = result.truth[user_id]
            writer.writerow(
                [user_id]
                + [repr(getattr(record, attr)) for attr in METRIC_FIELDS.values()]
            )

    genome_dir = out_dir / "genome"
    genome_dir.mkdir(exist_ok=True)
    with (genome_dir / "genome-tags.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tagId", "tag"])
        for tag in planted.genome.tags:
            writer.writerow([tag.tag_id, tag.name])
    with (genome_dir / "genome-scores.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["movieId", "tagId", "relevance"])
        for movie_id in planted.genome.movie_ids:
            vec = planted.genome[movie_id]
            for tag in planted.genome.tags:
                writer.writerow([movie_id, tag.tag_id, repr(float(vec[tag.tag_id]))])

    write_manifest(
        out_dir, "simulate",
        inputs={},
        params={
            "seed": args.seed, "users_per_arm": args.users_per_arm,
            "movies": args.movies, "window": args.window, "shifts": args.shift or [],
        },
        outputs={
            "events": events_path, "arms": arms_path, "cohorts": cohorts_path,
            "truth": truth_path, "genome": genome_dir,
        },
    )
    print(f"simulated {len(result.arms)} users, {len(result.events)} events -> {out_dir}")
    return 0


def _load_genome_any(args) -> "Genome":
    from .corpus import load_genome

    genome_dir = Path(args.genome_dir)
    return load_genome(genome_dir / "genome-scores.csv", genome_dir / "genome-tags.csv")


def cmd_analyze(args) -> int:
    events = read_event_log(args.events)
    arms = _read_arms(Path(args.arms))
    genome = _load_genome_any(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    windows = {
        "pre": _parse_window(args.pre) if args.pre else None,
        "during": _parse_window(args.during) if args.during else None,
        "post": _parse_window(args.post) if args.post else None,
    }
    windows = {name: w for name, w in windows.items() if w is not None}
    if not windows:
        raise ValueError("at least one of --pre/--during/--post is required")

    by_user: dict[int, list] = {}
    for event in events:
        by_user.setdefault(event.user_id, []).append(event)

    metrics_by_window: dict[str, dict[str, list]] = {}
    for name, window in windows.items():
        per_arm: dict[str, list] = {}
        for user_id, arm in sorted(arms.items()):
            record = compute_metrics(user_id, by_user.get(user_id, ()), window, genome)
            per_arm.setdefault(arm.label, []).append(record)
        metrics_by_window[name] = per_arm

    report = analyze_experiment(metrics_by_window)

    means_path = out_dir / "means.csv"
    with means_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window", "arm", "metric", "mean", "n"])
        for row in report.means:
            writer.writerow([
                row.window, row.arm, row.metric,
                "" if row.mean is None else repr(row.mean), row.n,
            ])

    comparisons_path = out_dir / "comparisons.csv"
    with comparisons_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "window", "cohort", "metric", "comparison", "statistic", "dof",
            "p_value", "cohens_d", "stars",
        ])
        for row in report.comparisons:
            dof = row.dof if not isinstance(row.dof, tuple) else f"{row.dof[0]};{row.dof[1]}"
            writer.writerow([
                row.window, row.cohort, row.metric, row.comparison,
                repr(row.statistic), dof, repr(row.p_value),
                "" if row.effect_size is None else repr(row.effect_size), row.stars,
            ])

    summary_lines = [
        f"windows analyzed: {', '.join(windows)}",
        f"users: {len(arms)}; comparisons: {len(report.comparisons)}",
        "significant at p<0.05:",
    ]
    for row in report.significant(0.05):
        summary_lines.append(
            f"  [{row.window}] {row.cohort} {row.metric} {row.comparison}: "
            f"p={row.p_value:.4g} {row.stars}"
        )
    outputs = {"means": means_path, "comparisons": comparisons_path}

    if args.survey:
        olr_rows = _run_survey_olr(Path(args.survey), arms)
        olr_path = out_dir / "olr.csv"
        with olr_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([
                "predictor", "coef", "std_error", "t_value", "p_value",
                "odds_ratio", "ci_2.5%", "ci_97.5%",
            ])
            for row in olr_rows:
                writer.writerow([
                    row["predictor"], repr(row["coef"]), repr(row["std_error"]),
                    repr(row["t_value"]), repr(row["p_value"]), repr(row["odds_ratio"]),
                    repr(row["ci_2.5%"]), repr(row["ci_97.5%"]),
                ])
        outputs["olr"] = olr_path
        summary_lines.append("survey regression predictors (p<0.05):")
        for row in olr_rows:
            if row["p_value"] < 0.05:
                summary_lines.append(
                    f"  {row['predictor']}: coef={row['coef']:.3f} p={row['p_value']:.4g}"
                )

    summary_path = out_dir / "summary.txt"
    summary_path.write_text("\n".join(summary_lines) + "\n")
    outputs["summary"] = summary_path

    write_manifest(
        out_dir, "analyze",
        inputs={
            "events": Path(args.events), "arms": Path(args.arms),
            "genome": Path(args.genome_dir),
            **({"survey": Path(args.survey)} if args.survey else {}),
        },
        params={"pre": args.pre, "during": args.during, "post": args.post},
        outputs=outputs,
    )
    print("\n".join(summary_lines))
    return 0


def _run_survey_olr(survey_path: Path, arms: dict[int, Arm]) -> list[dict]:
    """Regress binned satisfaction on interface/habit codes plus the other
    survey metrics for users in the new-interface arms."""
    rows = []
    with survey_path.open(newline="", encoding="utf-8") as fh:
        for record in csv.DictReader(fh):
            user_id = int(record["user_id"])
            arm = arms.get(user_id)
            if arm is None:
                continue
            rows.append((record, arm))
    X, y = [], []
    for record, arm in rows:
        y.append(LIKERT_CODES[likert_bin(int(record["satisfaction"]))])
        X.append(
            [
                INTERFACE_CODES[arm.treatment.value],
                HABIT_CODES[arm.cohort.value],
            ]
            + [float(record[name]) for name in SURVEY_METRICS]
        )
    fit = fit_olr(X, y, predictor_names=["interface", "consumption_habit", *SURVEY_METRICS])
    return fit.summary_rows()


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="broadrec",
        description="Diversity-controllable movie recommender pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a data directory and emit a summary")
    p.add_argument("--data-dir", required=True, help="directory with the four CSV files")
    p.add_argument("--out", required=True, help="output directory for the summary report")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train a base recommender")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--algo", choices=ALGOS, required=True,
                   help="peasant=popularity, warrior=item-item CF, wizard=matrix factorization")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--features", type=int, default=50)
    p.add_argument("--epochs-per-feature", type=int, default=125)
    p.add_argument("--learning-rate", type=float, default=0.005)
    p.add_argument("--regularization", type=float, default=0.02)
    p.add_argument("--neighborhood-size", type=int, default=50)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cluster", help="k-means over the genome vectors")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--k", type=int, default=24)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--n-init", type=int, default=1,
                   help="k-means++ restarts; the best objective wins")
    p.add_argument("--report", help="write a top-10-tags-per-cluster report here")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("rerank", help="emit the 3 re-ranked pages for one user as JSON lines")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--algo", choices=ALGOS, default="wizard")
    p.add_argument("--user", type=int, required=True)
    p.add_argument("--level", type=int, required=True, choices=range(1, 6))
    p.add_argument("--pool-size", type=int, default=600)
    p.add_argument("--out", help="write JSON lines here instead of stdout")
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("diversity", help="history diversity score for one user")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--user", type=int, required=True)
    p.add_argument("--since", type=int, help="only count ratings at/after this epoch second")
    p.set_defaults(func=cmd_diversity)

    p = sub.add_parser("cohorts", help="median-split users by history diversity")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--out", required=True, help="cohorts CSV path")
    p.add_argument("--since", type=int)
    p.set_defaults(func=cmd_cohorts)

    p = sub.add_parser("assign", help="assign treatments within cohorts")
    p.add_argument("--cohorts", required=True, help="cohorts CSV from the cohorts command")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="arms CSV path")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--data-dir")
    p.add_argument("--model-dir")
    p.add_argument("--arms")
    p.add_argument("--algo", choices=ALGOS)
    p.add_argument("--port", type=int)
    p.add_argument("--host")
    p.add_argument("--event-log")
    p.add_argument("--session-timeout", type=float)
    p.add_argument("--pool-size", type=int)
    p.add_argument("--config", help="JSON config file; precedence: flags > env > file > defaults")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("simulate", help="generate a synthetic event log with ground truth")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--users-per-arm", type=int, default=50)
    p.add_argument("--movies", type=int, default=300)
    p.add_argument("--window", default="2022-11-04..2022-12-17",
                   help="observation window, YYYY-MM-DD..YYYY-MM-DD (end exclusive)")
    p.add_argument("--shift", action="append",
                   help="behavior multiplier ARM:RATE:FACTOR, e.g. ND-BRC_DS:logins_per_month:1.2")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="metrics, tests, and survey regression from an event log")
    p.add_argument("--events", required=True)
    p.add_argument("--arms", required=True)
    p.add_argument("--genome-dir", required=True,
                   help="directory holding genome-scores.csv and genome-tags.csv")
    p.add_argument("--survey", help="survey CSV (user_id + Likert columns)")
    p.add_argument("--pre", help="pre-experiment window A..B")
    p.add_argument("--during", help="during-experiment window C..D")
    p.add_argument("--post", help="post-experiment window E..F")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CorpusFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
