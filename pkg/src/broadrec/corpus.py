"""MovieLens-style corpus ingestion: ratings, movie metadata, and tag-genome vectors.

File layout expected under a data directory (UTF-8, comma-separated, one
header line each):

    ratings.csv        userId,movieId,rating,timestamp
    movies.csv         movieId,title,genres
    genome-scores.csv  movieId,tagId,relevance
    genome-tags.csv    tagId,tag

Loading is single-threaded per file; the resulting :class:`Corpus` is
immutable by convention and safe for concurrent readers.
"""

from __future__ import annotations

import csv
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

log = logging.getLogger(__name__)

GENOME_DIM = 1128

_TITLE_YEAR_RE = re.compile(r"\((\d{4})\)\s*$")


class CorpusFormatError(ValueError):
    """A data file violated the expected schema; message carries the line number."""


class Movie(NamedTuple):
    movie_id: int
    title: str
    year: int | None = None


class RatingEvent(NamedTuple):
    user_id: int
    movie_id: int
    rating: float
    timestamp: int


class TagLabel(NamedTuple):
    tag_id: int
    name: str


def is_half_star(value: float) -> bool:
    """True when `value` lies on the 0.5-step rating grid in [0.5, 5.0]."""
    doubled = value * 2.0
    return doubled == int(doubled) and 1 <= doubled <= 10


class Genome(Mapping[int, np.ndarray]):
    """Dense tag-relevance vectors, one row of length 1128 per movie.

    Behaves as a read-only mapping movie_id -> vector; also exposes the
    underlying matrix and the ordered tag labels for bulk numeric work.
    """

    def __init__(self, movie_ids: Iterable[int], matrix: np.ndarray, tags: list[TagLabel]):
        self.movie_ids = list(movie_ids)
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.tags = tags
        if self.matrix.ndim != 2 or self.matrix.shape[1] != len(tags):
            raise ValueError("genome matrix shape does not match tag count")
        if self.matrix.shape[0] != len(self.movie_ids):
            raise ValueError("genome matrix rows do not match movie ids")
        self._row = {m: i for i, m in enumerate(self.movie_ids)}

    def __getitem__(self, movie_id: int) -> np.ndarray:
        return self.matrix[self._row[movie_id]]

    def __iter__(self) -> Iterator[int]:
        return iter(self.movie_ids)

    def __len__(self) -> int:
        return len(self.movie_ids)

    def vectors(self, movie_ids: Iterable[int]) -> np.ndarray:
        """Stack the vectors for `movie_ids` into one (n, dim) array."""
        rows = [self._row[m] for m in movie_ids]
        return self.matrix[rows]


@dataclass
class Corpus:
    """Loaded and validated data: movies, latest-wins ratings, and genome."""

    movies: dict[int, Movie]
    ratings: list[RatingEvent]
    genome: Genome
    rated_by_user: dict[int, list[RatingEvent]] = field(init=False, repr=False)

    def __post_init__(self):
        by_user: dict[int, list[RatingEvent]] = {}
        for ev in self.ratings:
            by_user.setdefault(ev.user_id, []).append(ev)
        self.rated_by_user = by_user

    @property
    def user_ids(self) -> list[int]:
        return sorted(self.rated_by_user)

    def user_rated_movie_ids(self, user_id: int) -> set[int]:
        return {ev.movie_id for ev in self.rated_by_user.get(user_id, [])}


def load_ratings(path: str | Path) -> list[RatingEvent]:
    """Parse a ratings CSV, resolving duplicate (user, movie) pairs to the
    latest timestamp (equal timestamps: the later row in the file wins).

    Raises CorpusFormatError with the offending line number on any malformed
    row or off-grid rating.
    """
    path = Path(path)
    latest: dict[tuple[int, int], RatingEvent] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["userId", "movieId", "rating", "timestamp"]:
            raise CorpusFormatError(f"{path}: expected header userId,movieId,rating,timestamp")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                user_id = int(row[0])
                movie_id = int(row[1])
                rating = float(row[2])
                timestamp = int(float(row[3]))
            except (ValueError, IndexError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: malformed row {row!r}") from exc
            if not is_half_star(rating):
                raise CorpusFormatError(f"{path}:{lineno}: rating off half-star grid: {rating}")
            event = RatingEvent(user_id, movie_id, rating, timestamp)
            key = (user_id, movie_id)
            prev = latest.get(key)
            if prev is None or event.timestamp >= prev.timestamp:
                latest[key] = event
    return sorted(latest.values(), key=lambda e: (e.user_id, e.movie_id))


def load_genome(scores_path: str | Path, tags_path: str | Path) -> Genome:
    """Load tag labels and relevance scores into a dense Genome.

    The tags file must define exactly 1128 tags; movies missing some scores
    are zero-filled (logged). Relevance values outside [0, 1] are rejected.
    """
    tags_path = Path(tags_path)
    scores_path = Path(scores_path)

    raw_tags: list[tuple[int, str]] = []
    with tags_path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["tagId", "tag"]:
            raise CorpusFormatError(f"{tags_path}: expected header tagId,tag")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                raw_tags.append((int(row[0]), row[1]))
            except (ValueError, IndexError) as exc:
                raise CorpusFormatError(f"{tags_path}:{lineno}: malformed row {row!r}") from exc
    if len(raw_tags) != GENOME_DIM:
        raise CorpusFormatError(
            f"{tags_path}: genome dimension mismatch: {len(raw_tags)} tags, expected {GENOME_DIM}"
        )
    if len({t for t, _ in raw_tags}) != GENOME_DIM:
        raise CorpusFormatError(f"{tags_path}: duplicate tagId")

    # File tag ids may be arbitrary; vectors use dense indices in file order.
    dense_index = {file_id: i for i, (file_id, _) in enumerate(raw_tags)}
    tags = [TagLabel(i, name) for i, (_, name) in enumerate(raw_tags)]

    rows: dict[int, np.ndarray] = {}
    filled_count: dict[int, int] = Counter()
    with scores_path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["movieId", "tagId", "relevance"]:
            raise CorpusFormatError(f"{scores_path}: expected header movieId,tagId,relevance")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                movie_id = int(row[0])
                tag_file_id = int(row[1])
                relevance = float(row[2])
            except (ValueError, IndexError) as exc:
                raise CorpusFormatError(f"{scores_path}:{lineno}: malformed row {row!r}") from exc
            if not np.isfinite(relevance) or not 0.0 <= relevance <= 1.0:
                raise CorpusFormatError(
                    f"{scores_path}:{lineno}: relevance outside [0,1]: {relevance}"
                )
            if tag_file_id not in dense_index:
                raise CorpusFormatError(f"{scores_path}:{lineno}: unknown tagId {tag_file_id}")
            vec = rows.get(movie_id)
            if vec is None:
                vec = np.zeros(GENOME_DIM)
                rows[movie_id] = vec
                filled_count[movie_id] = GENOME_DIM
            idx = dense_index[tag_file_id]
            vec[idx] = relevance
            filled_count[movie_id] -= 1

    incomplete = {m: n for m, n in filled_count.items() if n > 0}
    if incomplete:
        log.warning(
            "genome: %d movies missing some relevance rows; zero-filled (e.g. %s)",
            len(incomplete),
            dict(list(incomplete.items())[:3]),
        )

    movie_ids = sorted(rows)
    matrix = np.vstack([rows[m] for m in movie_ids]) if movie_ids else np.empty((0, GENOME_DIM))
    return Genome(movie_ids, matrix, tags)


def load_movies(path: str | Path) -> dict[int, Movie]:
    path = Path(path)
    movies: dict[int, Movie] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["movieId", "title"]:
            raise CorpusFormatError(f"{path}: expected header movieId,title[,genres]")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                movie_id = int(row[0])
                title = row[1]
            except (ValueError, IndexError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: malformed row {row!r}") from exc
            if movie_id in movies:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate movieId {movie_id}")
            year_match = _TITLE_YEAR_RE.search(title)
            year = int(year_match.group(1)) if year_match else None
            movies[movie_id] = Movie(movie_id, title, year)
    return movies


def load_corpus(data_dir: str | Path) -> Corpus:
    """Load the four-file corpus from `data_dir` and check referential integrity:
    every movie referenced by a rating or genome row must exist in movies.csv.
    """
    data_dir = Path(data_dir)
    movies = load_movies(data_dir / "movies.csv")
    ratings = load_ratings(data_dir / "ratings.csv")
    genome = load_genome(data_dir / "genome-scores.csv", data_dir / "genome-tags.csv")

    known = movies.keys()
    for ev in ratings:
        if ev.movie_id not in known:
            raise CorpusFormatError(f"ratings reference unknown movie {ev.movie_id}")
    for movie_id in genome.movie_ids:
        if movie_id not in known:
            raise CorpusFormatError(f"genome references unknown movie {movie_id}")
    return Corpus(movies=movies, ratings=ratings, genome=genome)


def write_corpus(corpus: Corpus, data_dir: str | Path) -> None:
    """Write a corpus back out in the same four-file layout (round-trip safe)."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    with (data_dir / "movies.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["movieId", "title", "genres"])
        for movie in sorted(corpus.movies.values()):
            writer.writerow([movie.movie_id, movie.title, ""])

    with (data_dir / "ratings.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["userId", "movieId", "rating", "timestamp"])
        for ev in corpus.ratings:
            writer.writerow([ev.user_id, ev.movie_id, format_rating(ev.rating), ev.timestamp])

    with (data_dir / "genome-tags.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tagId", "tag"])
        for tag in corpus.genome.tags:
            writer.writerow([tag.tag_id, tag.name])

    with (data_dir / "genome-scores.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["movieId", "tagId", "relevance"])
        for movie_id in corpus.genome.movie_ids:
            vec = corpus.genome[movie_id]
            for tag in corpus.genome.tags:
                writer.writerow([movie_id, tag.tag_id, repr(float(vec[tag.tag_id]))])


def format_rating(value: float) -> str:
    """Render a half-star rating the way MovieLens files do (e.g. '4.5')."""
    return f"{value:.1f}"


class CorpusSummary(NamedTuple):
    user_count: int
    movie_count: int
    rating_count: int
    ratings_per_user: dict[int, int]  # histogram: #ratings -> #users


def corpus_summary(corpus: Corpus) -> CorpusSummary:
    """Deterministic aggregate counts plus a per-user activity histogram."""
    per_user = Counter(ev.user_id for ev in corpus.ratings)
    histogram = Counter(per_user.values())
    return CorpusSummary(
        user_count=len(per_user),
        movie_count=len(corpus.movies),
        rating_count=len(corpus.ratings),
        ratings_per_user=dict(sorted(histogram.items())),
    )
