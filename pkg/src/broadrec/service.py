"""HTTP facade binding the recommenders, re-ranking, experiment arms, and
event logging into the JSON API the UI consumes.

Sessions are opaque tokens with a per-session diversity level that always
starts at 3; slider changes persist for the session and reset on the next
login. Every state-changing request appends exactly one event-log line.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from .clustering import ClusterModel
from .corpus import Corpus, RatingEvent, is_half_star
from .experiment import Arm, InteractionEvent, Treatment, event_to_json
from .recommenders import Model, top_n
from .rerank import LEVELS, PAGES_PER_RESPONSE, RecPage, rerank_response

DEFAULT_LEVEL = 3

INFO_PREAMBLE = (
    "Dear MovieLens user, we're experimenting with changes related to the "
    "movies we show users, particularly -- "
)

INFO_MESSAGES = {
    Treatment.BRC: INFO_PREAMBLE
    + "a new carousel that you can find above the top picks carousel on the "
    "home page. You may see different content than you're used to.",
    Treatment.BRC_DS: INFO_PREAMBLE
    + 'a new page with a slider bar control that you can enter by clicking the '
    'carousel header or "adjust" button next to the top carousel. You will '
    "see 5 levels of diversity to toggle with.",
    Treatment.CONTROL: INFO_PREAMBLE
    + "the top-picks carousel. You may see different content than you're used to.",
}

GENERIC_EVENT_KINDS = {"page_view", "carousel_click", "logout", "info_ack"}


@dataclass
class ServiceConfig:
    session_timeout_minutes: float = 30.0
    pool_size: int = 600
    page_size: int = 24
    pages: int = PAGES_PER_RESPONSE
    home_carousel_size: int = 24


@dataclass
class SessionState:
    token: str
    user_id: int
    arm: Arm
    level: int = DEFAULT_LEVEL
    last_active: float = 0.0


@dataclass
class RecommenderService:
    """All mutable serving state behind one lock; models stay immutable."""

    corpus: Corpus
    model: Model
    clusters: ClusterModel
    arms: dict[int, Arm]
    event_log_path: Path
    config: ServiceConfig = field(default_factory=ServiceConfig)
    clock: Callable[[], float] = time.time

    def __post_init__(self):
        self.event_log_path = Path(self.event_log_path)
        self.event_log_path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionState] = {}
        self._acknowledged: set[int] = set()
        self._wishlists: dict[int, set[int]] = {}
        self._ratings: dict[tuple[int, int], RatingEvent] = {
            (ev.user_id, ev.movie_id): ev for ev in self.corpus.ratings
        }

    # -- internals ---------------------------------------------------------

    def _log(self, event: InteractionEvent) -> None:
        with self.event_log_path.open("a", encoding="utf-8") as fh:
            fh.write(event_to_json(event) + "\n")

    def _session(self, token: str) -> SessionState:
        session = self._sessions.get(token)
        if session is None:
            raise HTTPException(status_code=401, detail="unknown session token")
        now = self.clock()
        if now - session.last_active >= self.config.session_timeout_minutes * 60.0:
            del self._sessions[token]
            raise HTTPException(status_code=401, detail="session expired")
        session.last_active = now
        return session

    def _rated_movies(self, user_id: int) -> set[int]:
        return {movie for (u, movie) in self._ratings if u == user_id}

    def _candidate_pool(self, user_id: int):
        result = top_n(
            self.model,
            user_id,
            self.config.pool_size,
            exclude=self._rated_movies(user_id),
            candidates=self.corpus.genome.movie_ids,
        )
        return result.items

    def _pages(self, user_id: int, level: int) -> list[RecPage]:
        pool = self._candidate_pool(user_id)
        if not pool:
            raise HTTPException(status_code=409, detail="no eligible candidates")
        return rerank_response(
            self.clusters, pool, level, pages=self.config.pages,
            page_size=self.config.page_size,
        )

    def _slot_payload(self, page: RecPage) -> dict:
        return {
            "page_index": page.page_index,
            "degraded": page.degraded,
            "slots": [
                {
                    "movie_id": s.movie_id,
                    "title": self.corpus.movies[s.movie_id].title,
                    "score": round(s.score, 4),
                    "cluster_id": s.cluster_id,
                }
                for s in page.slots
            ],
        }

    # -- operations --------------------------------------------------------

    def open_session(self, user_id: int) -> dict:
        with self._lock:
            arm = self.arms.get(user_id)
            if arm is None:
                raise HTTPException(status_code=404, detail="user not enrolled")
            token = secrets.token_hex(16)
            now = self.clock()
            self._sessions[token] = SessionState(
                token=token, user_id=user_id, arm=arm, last_active=now
            )
            self._log(InteractionEvent(user_id, "login", now, session=token))
            message = (
                INFO_MESSAGES[arm.treatment] if user_id not in self._acknowledged else None
            )
            return {
                "token": token,
                "user_id": user_id,
                "arm": arm.label,
                "treatment": arm.treatment.value,
                "level": DEFAULT_LEVEL,
                "info_message": message,
            }

    def home(self, token: str) -> dict:
        with self._lock:
            session = self._session(token)
            picks = top_n(
                self.model,
                session.user_id,
                self.config.home_carousel_size,
                exclude=self._rated_movies(session.user_id),
                candidates=self.corpus.genome.movie_ids,
            ).items
            payload: dict = {
                "arm": session.arm.label,
                "treatment": session.arm.treatment.value,
                "top_picks": [
                    {
                        "movie_id": c.movie_id,
                        "title": self.corpus.movies[c.movie_id].title,
                        "score": round(c.score, 4),
                    }
                    for c in picks
                ],
                "broad": None,
                "level": None,
            }
            if session.arm.treatment is Treatment.BRC:
                payload["broad"] = self._slot_payload(self._pages(session.user_id, 5)[0])
            elif session.arm.treatment is Treatment.BRC_DS:
                payload["broad"] = self._slot_payload(
                    self._pages(session.user_id, session.level)[0]
                )
                payload["level"] = session.level
            return payload

    def broad_page(self, token: str, page: int) -> dict:
        with self._lock:
            session = self._session(token)
            if session.arm.treatment is Treatment.CONTROL:
                raise HTTPException(status_code=403, detail="no broad surface for this arm")
            if not 1 <= page <= self.config.pages:
                raise HTTPException(
                    status_code=400,
                    detail=f"only the first {self.config.pages} pages are re-ranked",
                )
            level = 5 if session.arm.treatment is Treatment.BRC else session.level
            pages = self._pages(session.user_id, level)
            payload = self._slot_payload(pages[page - 1])
            payload["level"] = level if session.arm.treatment is Treatment.BRC_DS else None
            return payload

    def set_level(self, token: str, level: int) -> dict:
        with self._lock:
            session = self._session(token)
            if session.arm.treatment is not Treatment.BRC_DS:
                raise HTTPException(status_code=403, detail="no slider for this arm")
            if level not in LEVELS:
                raise HTTPException(
                    status_code=400, detail=f"diversity level must be in {sorted(LEVELS)}"
                )
            session.level = level
            self._log(
                InteractionEvent(
                    session.user_id, "slider_set", self.clock(), level=level, session=token
                )
            )
            payload = self._slot_payload(self._pages(session.user_id, level)[0])
            payload["level"] = level
            return payload

    def add_rating(self, token: str, movie_id: int, value: float) -> dict:
        with self._lock:
            session = self._session(token)
            if movie_id not in self.corpus.movies:
                raise HTTPException(status_code=404, detail="unknown movie")
            if not is_half_star(value):
                raise HTTPException(status_code=400, detail="rating off half-star grid")
            now = self.clock()
            self._ratings[(session.user_id, movie_id)] = RatingEvent(
                session.user_id, movie_id, value, int(now)
            )
            self._log(
                InteractionEvent(
                    session.user_id, "rating", now, movie_id=movie_id,
                    value=value, session=token,
                )
            )
            return {"stored": True, "movie_id": movie_id, "value": value}

    def add_wishlist(self, token: str, movie_id: int) -> dict:
        with self._lock:
            session = self._session(token)
            if movie_id not in self.corpus.movies:
                raise HTTPException(status_code=404, detail="unknown movie")
            wishlist = self._wishlists.setdefault(session.user_id, set())
            added = movie_id not in wishlist
            wishlist.add(movie_id)
            self._log(
                InteractionEvent(
                    session.user_id, "wishlist_add", self.clock(),
                    movie_id=movie_id, session=token,
                )
            )
            return {"added": added, "wishlist_size": len(wishlist)}

    def record_event(
        self, token: str, kind: str, movie_id: int | None = None,
        treatment: str | None = None,
    ) -> dict:
        with self._lock:
            session = self._session(token)
            if kind not in GENERIC_EVENT_KINDS:
                raise HTTPException(
                    status_code=400,
                    detail=f"kind must be one of {sorted(GENERIC_EVENT_KINDS)}",
                )
            if kind == "info_ack":
                self._acknowledged.add(session.user_id)
            self._log(
                InteractionEvent(
                    session.user_id, kind, self.clock(), movie_id=movie_id,
                    treatment=treatment, session=token,
                )
            )
            return {"logged": kind}


# --------------------------------------------------------------------------
# FastAPI wiring
# --------------------------------------------------------------------------

class SessionRequest(BaseModel):
    user_id: int


class LevelRequest(BaseModel):
    token: str
    level: int


class RatingRequest(BaseModel):
    token: str
    movie_id: int
    value: float


class WishlistRequest(BaseModel):
    token: str
    movie_id: int


class EventRequest(BaseModel):
    token: str
    kind: str
    movie_id: int | None = None
    treatment: str | None = None


def create_app(service: RecommenderService) -> FastAPI:
    app = FastAPI(title="broadrec", version="0.1.0")

    @app.post("/session")
    def open_session(req: SessionRequest):
        return service.open_session(req.user_id)

    @app.get("/home")
    def home(token: str = Query(...)):
        return service.home(token)

    @app.get("/broad")
    def broad(token: str = Query(...), page: int = Query(1)):
        return service.broad_page(token, page)

    @app.post("/level")
    def set_level(req: LevelRequest):
        return service.set_level(req.token, req.level)

    @app.post("/rating")
    def add_rating(req: RatingRequest):
        return service.add_rating(req.token, req.movie_id, req.value)

    @app.post("/wishlist")
    def add_wishlist(req: WishlistRequest):
        return service.add_wishlist(req.token, req.movie_id)

    @app.post("/event")
    def record_event(req: EventRequest):
        return service.record_event(req.token, req.kind, req.movie_id, req.treatment)

    return app
