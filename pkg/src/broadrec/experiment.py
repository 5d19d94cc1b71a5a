"""Factorial experiment harness: arm assignment, interaction event logging,
sessionization, per-user interaction metrics, and a seeded user simulator
that doubles as the ground-truth oracle for the metrics pipeline.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, asdict
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .corpus import Genome, RatingEvent, is_half_star
from .diversity import list_diversity

EVENT_SCHEMA_VERSION = 1

EVENT_KINDS = frozenset(
    {"login", "logout", "page_view", "slider_set", "rating", "wishlist_add",
     "carousel_click", "info_ack"}
)


class Treatment(str, Enum):
    CONTROL = "Control"
    BRC = "BRC"
    BRC_DS = "BRC_DS"


class Cohort(str, Enum):
    DIVERSE = "D"
    NONDIVERSE = "ND"


@dataclass(frozen=True)
class Arm:
    cohort: Cohort
    treatment: Treatment

    @property
    def label(self) -> str:
        return f"{self.cohort.value}-{self.treatment.value}"

    @staticmethod
    def from_label(label: str) -> "Arm":
        cohort_value, treatment_value = label.split("-", 1)
        return Arm(Cohort(cohort_value), Treatment(treatment_value))


ALL_ARMS = tuple(Arm(c, t) for c in Cohort for t in Treatment)


def assign_arm(user_id: int, cohort: Cohort, seed: int) -> Arm:
    """Deterministic treatment assignment: hash(user_id, seed) mod 3.

    Stable across processes and runs (uses sha256, not the salted builtin
    hash), so re-running enrollment never reshuffles users.
    """
    digest = hashlib.sha256(f"{user_id}:{seed}".encode()).digest()
    index = int.from_bytes(digest[:8], "big") % 3
    return Arm(cohort, (Treatment.CONTROL, Treatment.BRC, Treatment.BRC_DS)[index])


@dataclass(frozen=True)
class InteractionEvent:
    user_id: int
    kind: str
    timestamp: float
    movie_id: int | None = None
    level: int | None = None
    value: float | None = None
    treatment: str | None = None
    session: str | None = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind: {self.kind}")


def event_to_json(event: InteractionEvent) -> str:
    payload = {"schema_version": EVENT_SCHEMA_VERSION}
    payload.update({k: v for k, v in asdict(event).items() if v is not None})
    return json.dumps(payload, sort_keys=True)


def event_from_json(line: str) -> InteractionEvent:
    payload = json.loads(line)
    version = payload.pop("schema_version", None)
    if version != EVENT_SCHEMA_VERSION:
        raise ValueError(f"unsupported event schema version: {version}")
    return InteractionEvent(**payload)


def write_event_log(events: Iterable[InteractionEvent], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for event in events:
            fh.write(event_to_json(event) + "\n")


def read_event_log(path: str | Path) -> list[InteractionEvent]:
    events = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(event_from_json(line))
    return events


# --------------------------------------------------------------------------
# Sessionization and metrics
# --------------------------------------------------------------------------

@dataclass
class Session:
    user_id: int
    start: float
    end: float
    events: list[InteractionEvent]


class Window(NamedTuple):
    """Half-open time range [start, end) in epoch seconds."""

    start: float
    end: float

    @property
    def days(self) -> float:
        return (self.end - self.start) / 86400.0

    def contains(self, timestamp: float) -> bool:
        return self.start <= timestamp < self.end


def sessionize(
    events: Iterable[InteractionEvent], timeout_minutes: float = 30.0
) -> list[Session]:
    """Split per-user event streams into sessions.

    A new session starts at every login event and after any inactivity gap of
    at least `timeout_minutes`. Every event lands in exactly one session.
    """
    timeout = timeout_minutes * 60.0
    by_user: dict[int, list[InteractionEvent]] = {}
    for event in events:
        by_user.setdefault(event.user_id, []).append(event)

    sessions: list[Session] = []
    for user_id in sorted(by_user):
        stream = sorted(by_user[user_id], key=lambda e: e.timestamp)
        current: list[InteractionEvent] = []
        for event in stream:
            if current and (
                event.kind == "login" or event.timestamp - current[-1].timestamp >= timeout
            ):
                sessions.append(
                    Session(user_id, current[0].timestamp, current[-1].timestamp, current)
                )
                current = []
            current.append(event)
        if current:
            sessions.append(
                Session(user_id, current[0].timestamp, current[-1].timestamp, current)
            )
    return sessions


@dataclass
class MetricsRecord:
    """Per-user interaction aggregates for one observation window."""

    rating_diversity: float = 0.0
    slider_interactions: int = 0
    page_view_freq: float = 0.0
    login_frequency: float = 0.0
    total_length: float = 0.0  # minutes
    num_ratings: int = 0
    wishlist_freq: float = 0.0
    avg_rating: float | None = None


def compute_metrics(
    user_id: int,
    events: Iterable[InteractionEvent],
    window: Window,
    genome: Genome,
    ratings: Iterable[RatingEvent] = (),
    timeout_minutes: float = 30.0,
) -> MetricsRecord:
    """Aggregate one user's windowed events into a MetricsRecord.

    Rated movies come from rating events in the log plus any supplementary
    `ratings` rows falling inside the window. An empty window yields the
    zeroed record (avg_rating None).
    """
    windowed = sorted(
        (e for e in events if e.user_id == user_id and window.contains(e.timestamp)),
        key=lambda e: e.timestamp,
    )
    sessions = sessionize(windowed, timeout_minutes)

    rating_events = [e for e in windowed if e.kind == "rating"]
    rated_movies = {e.movie_id for e in rating_events if e.movie_id is not None}
    rated_movies |= {
        r.movie_id
        for r in ratings
        if r.user_id == user_id and window.contains(r.timestamp)
    }
    eligible = sorted(m for m in rated_movies if m in genome)
    rating_diversity = (
        list_diversity(genome.vectors(eligible)) if len(eligible) >= 2 else 0.0
    )

    n_logins = sum(1 for e in windowed if e.kind == "login")
    months = window.days / 30.0

    if sessions:
        page_view_freq = sum(
            len({e.movie_id for e in s.events if e.kind == "page_view"})
            for s in sessions
        ) / len(sessions)
        wishlist_freq = sum(
            sum(1 for e in s.events if e.kind == "wishlist_add") for s in sessions
        ) / len(sessions)
        total_length = sum((s.end - s.start) / 60.0 for s in sessions)
    else:
        page_view_freq = 0.0
        wishlist_freq = 0.0
        total_length = 0.0

    values = [e.value for e in rating_events if e.value is not None]
    return MetricsRecord(
        rating_diversity=rating_diversity,
        slider_interactions=sum(1 for e in windowed if e.kind == "slider_set"),
        page_view_freq=page_view_freq,
        login_frequency=n_logins / months if months > 0 else 0.0,
        total_length=total_length,
        num_ratings=len(rating_events),
        wishlist_freq=wishlist_freq,
        avg_rating=sum(values) / len(values) if values else None,
    )


# --------------------------------------------------------------------------
# Simulator
# --------------------------------------------------------------------------

@dataclass
class ArmBehavior:
    """Poisson-style behavior rates for one experiment arm."""

    logins_per_month: float = 8.0
    page_views_per_session: float = 2.0
    ratings_per_session: float = 1.2
    wishlist_per_session: float = 0.6
    slider_sets_per_session: float = 1.0  # only takes effect on slider arms
    session_minutes: float = 12.0
    rating_mean: float = 3.5

    def scaled(self, **multipliers: float) -> "ArmBehavior":
        """Copy with named rates multiplied, e.g. scaled(logins_per_month=1.2)."""
        params = asdict(self)
        for name, factor in multipliers.items():
            params[name] = params[name] * factor
        return ArmBehavior(**params)


@dataclass
class SimConfig:
    window: Window
    users_per_arm: int = 50
    timeout_minutes: float = 30.0
    behaviors: dict[str, ArmBehavior] = field(default_factory=dict)  # by arm label

    def behavior_for(self, arm: Arm) -> ArmBehavior:
        return self.behaviors.get(arm.label, ArmBehavior())

    def __post_init__(self):
        for behavior in self.behaviors.values():
            if behavior.session_minutes >= self.timeout_minutes:
                raise ValueError("session_minutes must stay below the session timeout")


@dataclass
class SimulationResult:
    events: list[InteractionEvent]
    truth: dict[int, MetricsRecord]
    arms: dict[int, Arm]


def simulate_users(config: SimConfig, genome: Genome, seed: int = 0) -> SimulationResult:
    """Generate a synthetic event log plus its own ground-truth metrics.

    The generator computes every truth field from its private bookkeeping
    (session placements, drawn counts) using the same definitions the metrics
    pipeline implements, so `compute_metrics` over the emitted log must
    reproduce the truth records exactly.
    """
    rng = np.random.default_rng(seed)
    window = config.window
    months = window.days / 30.0
    timeout_seconds = config.timeout_minutes * 60.0
    movie_ids = list(genome.movie_ids)
    if not movie_ids:
        raise ValueError("simulator needs a genome with at least one movie")

    events: list[InteractionEvent] = []
    truth: dict[int, MetricsRecord] = {}
    arms: dict[int, Arm] = {}

    user_id = 0
    for arm in ALL_ARMS:
        behavior = config.behavior_for(arm)
        for _ in range(config.users_per_arm):
            user_id += 1
            arms[user_id] = arm
            user_events, record = _simulate_one_user(
                user_id, arm, behavior, window, months, timeout_seconds, genome, rng
            )
            events.extend(user_events)
            truth[user_id] = record

    events.sort(key=lambda e: (e.timestamp, e.user_id))
    return SimulationResult(events=events, truth=truth, arms=arms)


def _simulate_one_user(
    user_id: int,
    arm: Arm,
    behavior: ArmBehavior,
    window: Window,
    months: float,
    timeout_seconds: float,
    genome: Genome,
    rng: np.random.Generator,
) -> tuple[list[InteractionEvent], MetricsRecord]:
    movie_ids = genome.movie_ids
    duration = behavior.session_minutes * 60.0
    n_sessions = int(rng.poisson(behavior.logins_per_month * months))

    events: list[InteractionEvent] = []
    session_lengths: list[float] = []
    page_view_counts: list[int] = []
    wishlist_counts: list[int] = []
    slider_total = 0
    rating_values: list[float] = []
    rated_movies: set[int] = set()

    t = window.start + float(rng.uniform(0.0, 3600.0))
    for _ in range(n_sessions):
        if t + duration >= window.end:
            break
        start = t
        end = start + duration

        n_views = int(rng.poisson(behavior.page_views_per_session))
        n_views = min(n_views, len(movie_ids))
        n_ratings = int(rng.poisson(behavior.ratings_per_session))
        n_wishlist = int(rng.poisson(behavior.wishlist_per_session))
        n_slider = (
            int(rng.poisson(behavior.slider_sets_per_session))
            if arm.treatment is Treatment.BRC_DS
            else 0
        )

        session_events: list[InteractionEvent] = [
            InteractionEvent(user_id, "login", start)
        ]
        viewed = rng.choice(len(movie_ids), size=n_views, replace=False)
        for idx in viewed:
            session_events.append(
                InteractionEvent(user_id, "page_view", 0.0, movie_id=movie_ids[int(idx)])
            )
        for _ in range(n_ratings):
            movie = movie_ids[int(rng.integers(len(movie_ids)))]
            value = float(
                np.clip(np.round(rng.normal(behavior.rating_mean, 0.9) * 2.0) / 2.0, 0.5, 5.0)
            )
            assert is_half_star(value)
            session_events.append(
                InteractionEvent(user_id, "rating", 0.0, movie_id=movie, value=value)
            )
            rating_values.append(value)
            rated_movies.add(movie)
        for _ in range(n_wishlist):
            movie = movie_ids[int(rng.integers(len(movie_ids)))]
            session_events.append(
                InteractionEvent(user_id, "wishlist_add", 0.0, movie_id=movie)
            )
        for _ in range(n_slider):
            level = int(rng.integers(1, 6))
            session_events.append(
                InteractionEvent(user_id, "slider_set", 0.0, level=level)
            )
        session_events.append(InteractionEvent(user_id, "logout", end))

        # Spread the interior events evenly inside (start, end); gaps stay
        # far below the timeout because duration < timeout.
        interior = session_events[1:-1]
        step = duration / (len(interior) + 1)
        for i, event in enumerate(interior, start=1):
            session_events[i] = InteractionEvent(
                event.user_id,
                event.kind,
                start + step * i,
                movie_id=event.movie_id,
                level=event.level,
                value=event.value,
            )

        events.extend(session_events)
        session_lengths.append((end - start) / 60.0)
        page_view_counts.append(n_views)
        wishlist_counts.append(n_wishlist)
        slider_total += n_slider

        t = end + timeout_seconds + 1.0 + float(rng.exponential(timeout_seconds))

    n_actual = len(session_lengths)
    eligible = sorted(m for m in rated_movies if m in genome)
    record = MetricsRecord(
        rating_diversity=(
            list_diversity(genome.vectors(eligible)) if len(eligible) >= 2 else 0.0
        ),
        slider_interactions=slider_total,
        page_view_freq=sum(page_view_counts) / n_actual if n_actual else 0.0,
        login_frequency=n_actual / months if months > 0 else 0.0,
        total_length=sum(session_lengths),
        num_ratings=len(rating_values),
        wishlist_freq=sum(wishlist_counts) / n_actual if n_actual else 0.0,
        avg_rating=sum(rating_values) / len(rating_values) if rating_values else None,
    )
    return events, record
