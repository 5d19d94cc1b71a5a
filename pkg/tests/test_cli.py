import csv
import json

import pytest

from broadrec.cli import build_parser, main
from broadrec.corpus import write_corpus
from broadrec.synth import make_corpus

SUBCOMMANDS = [
    "ingest", "train", "cluster", "rerank", "diversity", "cohorts",
    "assign", "serve", "simulate", "analyze",
]


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    corpus, _ = make_corpus(n_movies=120, n_users=20, ratings_per_user=25, seed=6)
    path = tmp_path_factory.mktemp("data")
    write_corpus(corpus, path)
    return path


def run(*argv):
    return main([str(a) for a in argv])


class TestHelp:
    def test_top_level_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["--help"])
        assert exc.value.code == 0

    @pytest.mark.parametrize("command", SUBCOMMANDS)
    def test_subcommand_help_exits_zero_and_documents_flags(self, command, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([command, "--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert "--help" in out or "usage" in out


class TestPipeline:
    def test_ingest(self, data_dir, tmp_path):
        assert run("ingest", "--data-dir", data_dir, "--out", tmp_path) == 0
        summary = json.loads((tmp_path / "corpus_summary.json").read_text())
        assert summary["user_count"] == 20
        assert summary["rating_count"] == 20 * 25
        assert (tmp_path / "ingest.manifest.json").exists()

    @pytest.mark.parametrize("algo", ["peasant", "warrior", "wizard"])
    def test_train_all_algos(self, data_dir, tmp_path, algo):
        code = run(
            "train", "--data-dir", data_dir, "--model-dir", tmp_path,
            "--algo", algo, "--seed", 5, "--features", 4, "--epochs-per-feature", 10,
        )
        assert code == 0
        assert (tmp_path / algo / "model.json").exists()

    def test_cluster_with_report(self, data_dir, tmp_path):
        code = run(
            "cluster", "--data-dir", data_dir, "--model-dir", tmp_path,
            "--k", 12, "--seed", 5, "--report", tmp_path / "tags.txt",
        )
        assert code == 0
        report = (tmp_path / "tags.txt").read_text()
        assert report.count("cluster") == 12
        assert "trait_" in report

    def test_cohorts_then_assign(self, data_dir, tmp_path):
        cohorts_csv = tmp_path / "cohorts.csv"
        arms_csv = tmp_path / "arms.csv"
        assert run("cohorts", "--data-dir", data_dir, "--out", cohorts_csv) == 0
        with cohorts_csv.open() as fh:
            rows = list(csv.DictReader(fh))
        assert {row["cohort"] for row in rows} == {"D", "ND"}
        counts = [sum(1 for r in rows if r["cohort"] == c) for c in ("D", "ND")]
        assert abs(counts[0] - counts[1]) <= 1

        assert run("assign", "--cohorts", cohorts_csv, "--seed", 3, "--out", arms_csv) == 0
        with arms_csv.open() as fh:
            arm_rows = list(csv.DictReader(fh))
        assert len(arm_rows) == len(rows)
        assert {row["treatment"] for row in arm_rows} <= {"Control", "BRC", "BRC_DS"}

    def test_rerank_emits_three_deterministic_json_lines(self, data_dir, tmp_path, capsys):
        for sub in ("a", "b"):
            assert run(
                "train", "--data-dir", data_dir, "--model-dir", tmp_path / sub,
                "--algo", "peasant", "--seed", 1,
            ) == 0
            assert run(
                "cluster", "--data-dir", data_dir, "--model-dir", tmp_path / sub,
                "--k", 12, "--seed", 1,
            ) == 0
        for stage in ("train-peasant", "cluster"):
            assert (tmp_path / "a" / f"{stage}.manifest.json").read_bytes() == (
                tmp_path / "b" / f"{stage}.manifest.json"
            ).read_bytes()
        outputs = []
        for sub in ("a", "b"):
            capsys.readouterr()
            assert run(
                "rerank", "--data-dir", data_dir, "--model-dir", tmp_path / sub,
                "--algo", "peasant", "--user", 1, "--level", 3,
            ) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]
        lines = [json.loads(line) for line in outputs[0].strip().splitlines()]
        assert [line["page_index"] for line in lines] == [1, 2, 3]
        assert all(line["level"] == 3 for line in lines)

    def test_diversity_command(self, data_dir, capsys):
        assert run("diversity", "--data-dir", data_dir, "--user", 1) == 0
        assert "history diversity" in capsys.readouterr().out

    def test_missing_data_dir_is_user_error(self, tmp_path):
        assert run("ingest", "--data-dir", tmp_path / "nope", "--out", tmp_path) == 1


class TestSimulateAnalyze:
    def test_simulate_deterministic_manifests(self, tmp_path):
        for sub in ("x", "y"):
            code = run(
                "simulate", "--out", tmp_path / sub, "--seed", 11,
                "--users-per-arm", 4, "--movies", 40,
            )
            assert code == 0
        manifest_x = (tmp_path / "x" / "simulate.manifest.json").read_text()
        manifest_y = (tmp_path / "y" / "simulate.manifest.json").read_text()
        assert manifest_x == manifest_y
        assert (tmp_path / "x" / "events.jsonl").read_bytes() == (
            tmp_path / "y" / "events.jsonl"
        ).read_bytes()

    def test_analyze_reports_reproducible(self, tmp_path):
        sim = tmp_path / "sim"
        assert run(
            "simulate", "--out", sim, "--seed", 2, "--users-per-arm", 6, "--movies", 40,
        ) == 0
        for sub in ("r1", "r2"):
            code = run(
                "analyze", "--events", sim / "events.jsonl", "--arms", sim / "arms.csv",
                "--genome-dir", sim / "genome",
                "--during", "2022-11-04..2022-12-17", "--out", tmp_path / sub,
            )
            assert code == 0
        for name in ("means.csv", "comparisons.csv", "summary.txt"):
            assert (tmp_path / "r1" / name).read_bytes() == (
                tmp_path / "r2" / name
            ).read_bytes()

    def test_analyze_flags_planted_shift(self, tmp_path):
        sim = tmp_path / "sim"
        assert run(
            "simulate", "--out", sim, "--seed", 8, "--users-per-arm", 60, "--movies", 40,
            "--shift", "ND-BRC_DS:logins_per_month:1.6",
        ) == 0
        out = tmp_path / "report"
        assert run(
            "analyze", "--events", sim / "events.jsonl", "--arms", sim / "arms.csv",
            "--genome-dir", sim / "genome",
            "--during", "2022-11-04..2022-12-17", "--out", out,
        ) == 0
        with (out / "comparisons.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        hits = [
            row for row in rows
            if row["cohort"] == "ND" and row["metric"] == "loginFrequency"
            and row["comparison"] == "BRC_DS vs Control"
        ]
        assert hits and float(hits[0]["p_value"]) < 0.05

    def test_analyze_with_survey_runs_olr(self, tmp_path):
        import numpy as np

        sim = tmp_path / "sim"
        assert run(
            "simulate", "--out", sim, "--seed", 5, "--users-per-arm", 40, "--movies", 40,
        ) == 0
        rng = np.random.default_rng(0)
        survey = tmp_path / "survey.csv"
        with survey.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([
                "user_id", "accuracy", "diversity", "novelty", "level_of_effort",
                "trustworthiness", "ease_of_use", "satisfaction", "usage_frequency",
            ])
            for user_id in range(1, 241):
                writer.writerow([user_id] + rng.integers(1, 6, size=8).tolist())
        out = tmp_path / "report"
        assert run(
            "analyze", "--events", sim / "events.jsonl", "--arms", sim / "arms.csv",
            "--genome-dir", sim / "genome", "--survey", survey,
            "--during", "2022-11-04..2022-12-17", "--out", out,
        ) == 0
        with (out / "olr.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert [row["predictor"] for row in rows][:2] == ["interface", "consumption_habit"]
        assert len(rows) == 9

    def test_bad_window_is_user_error(self, tmp_path):
        sim = tmp_path / "sim"
        assert run(
            "simulate", "--out", sim, "--seed", 2, "--users-per-arm", 2, "--movies", 40,
        ) == 0
        code = run(
            "analyze", "--events", sim / "events.jsonl", "--arms", sim / "arms.csv",
            "--genome-dir", sim / "genome", "--during", "not-a-window",
            "--out", tmp_path / "r",
        )
        assert code == 1


class TestModelStoreRoundTrip:
    def test_factor_model_round_trip(self, data_dir, tmp_path):
        import numpy as np

        from broadrec.corpus import load_corpus
        from broadrec.recommenders import train_funk_svd, top_n
        from broadrec.store import load_model, save_model

        corpus = load_corpus(data_dir)
        model = train_funk_svd(corpus.ratings, features=4, epochs_per_feature=10, seed=2)
        save_model(model, tmp_path / "m")
        loaded = load_model(tmp_path / "m")
        assert np.array_equal(loaded.user_factors, model.user_factors)
        assert loaded.user_index == model.user_index
        assert top_n(loaded, 1, 10) == top_n(model, 1, 10)

    def test_item_item_round_trip(self, data_dir, tmp_path):
        from broadrec.corpus import load_corpus
        from broadrec.recommenders import train_item_item, predict
        from broadrec.store import load_model, save_model

        corpus = load_corpus(data_dir)
        model = train_item_item(corpus.ratings, neighborhood_size=10)
        save_model(model, tmp_path / "m")
        loaded = load_model(tmp_path / "m")
        assert loaded.neighbors == model.neighbors
        assert predict(loaded, 3, 50) == predict(model, 3, 50)

    def test_cluster_model_round_trip(self, data_dir, tmp_path):
        import numpy as np

        from broadrec.clustering import kmeans
        from broadrec.corpus import load_corpus
        from broadrec.store import load_model, save_model

        corpus = load_corpus(data_dir)
        model = kmeans(corpus.genome, k=8, seed=0, ratings=corpus.ratings)
        save_model(model, tmp_path / "m")
        loaded = load_model(tmp_path / "m")
        assert loaded.assignment == model.assignment
        assert np.array_equal(loaded.centroids, model.centroids)
        assert np.array_equal(loaded.rating_count, model.rating_count)
        assert [t.name for t in loaded.tags] == [t.name for t in model.tags]

    def test_unversioned_model_rejected(self, tmp_path):
        from broadrec.store import load_model

        (tmp_path / "model.json").write_text('{"kind": "popularity"}')
        with pytest.raises(ValueError, match="schema version"):
            load_model(tmp_path)


class TestServeConfigPrecedence:
    def test_flag_beats_env_beats_file_beats_default(self, monkeypatch):
        from broadrec.cli import _env_or

        monkeypatch.delenv("BROADREC_PORT", raising=False)
        assert _env_or(None, "BROADREC_PORT", 8000, int) == 8000
        monkeypatch.setenv("BROADREC_PORT", "9100")
        assert _env_or(None, "BROADREC_PORT", 8000, int) == 9100
        assert _env_or(9500, "BROADREC_PORT", 8000, int) == 9500
