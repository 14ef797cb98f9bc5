"""FastAPI application exposing the /v1 analysis and review endpoints.

Concurrency contract: reads are unrestricted; feedback appends are serialized
by the store's writer lock; retraining runs exclusively behind a non-blocking
mutex; model activation is an atomic swap, so any in-flight request sees
exactly one model generation.
"""

from __future__ import annotations

import base64
import json
import logging
import threading
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Request, Response
from pydantic import BaseModel

from ..classifier import HierarchicalModel, train_hierarchy
from ..mapping import CveNotFoundError, MappingTable, analyze_cve, build_mapping_table, rank_actors
from ..metrics import micro_macro_scores
from ..snapshot import KnowledgeSnapshot, load_snapshot
from ..textprep import parse_glossary
from ..workflows import desk_sample_and_split, evaluate_split, labeled_entries
from .config import ServiceConfig
from .feedback import DuplicateFeedbackError, FeedbackStore, VERDICTS
from .registry import ModelRegistry, RegistryEntry

logger = logging.getLogger(__name__)


class AnalysisRequest(BaseModel):
    cve_id: Optional[str] = None
    description: Optional[str] = None
    include_actors: bool = True
    max_techniques: Optional[int] = None


class FeedbackRequest(BaseModel):
    cve_id: str
    proposed_cwe: int
    verdict: str
    replacement_cwe: Optional[int] = None
    reviewer: str


class QueueItem(BaseModel):
    cve_id: str
    description: str
    cwe: int
    cwe_name: str
    score: float
    path: list[int]
    fallback: bool


class ServiceState:
    """Owns the snapshot, registry, feedback store and the active model."""

    def __init__(self, config: ServiceConfig, snapshot: KnowledgeSnapshot | None = None):
        self.config = config
        self.snapshot = snapshot or load_snapshot(config.snapshot_path)
        curated = None
        if config.curated_map_path:
            curated = Path(config.curated_map_path).read_text()
        self.table: MappingTable = build_mapping_table(self.snapshot, curated)
        self.glossary = ()
        if config.glossary_path:
            self.glossary = parse_glossary(Path(config.glossary_path).read_text())
        self.registry = ModelRegistry(config.registry_path)
        self.feedback = FeedbackStore(config.feedback_log_path)
        self._model_lock = threading.Lock()
        self._retrain_lock = threading.Lock()
        self._active_model: HierarchicalModel | None = None
        self._active_id: str | None = None
        self._queue_cache: tuple[str, list[dict]] | None = None
        entry = self.registry.active_entry()
        if entry is not None:
            self._set_active(entry)

    # ------------------------------------------------------------- model

    def _set_active(self, entry: RegistryEntry) -> None:
        model = self.registry.load(entry.model_id)
        with self._model_lock:
            self._active_model = model
            self._active_id = entry.model_id

    def active(self) -> tuple[HierarchicalModel, str]:
        with self._model_lock:
            if self._active_model is None:
                raise HTTPException(status_code=409, detail="no active model")
            return self._active_model, self._active_id

    def active_id_or_none(self) -> str | None:
        with self._model_lock:
            return self._active_id

    def activate(self, model_id: str) -> RegistryEntry:
        entry = self.registry.get_entry(model_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"model {model_id} not in registry")
        entry = self.registry.activate(model_id)
        self._set_active(entry)
        return entry

    # ------------------------------------------------------------ retrain

    def retrain(self) -> RegistryEntry:
        if not self._retrain_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="retrain already running")
        try:
            added, removed = self.feedback.label_adjustments()
            config = self.config.training
            entries = labeled_entries(self.snapshot)
            sample_size = self.config.sample_size or len(entries)
            split = desk_sample_and_split(self.snapshot, sample_size, seed=config.seed)
            # CVEs gaining their first label through feedback join the training set
            train_ids = sorted(set(split.train) | (set(added) - {c for c, _ in entries}))
            model = train_hierarchy(
                self.snapshot,
                config,
                cve_ids=train_ids,
                glossary=self.glossary,
                extra_labels=added,
                removed_labels=removed,
            )
            reports = evaluate_split(
                model, self.snapshot, split.test, cutoffs=(config.min_samples,)
            )
            metrics = {
                "micro_f": round(reports[0].micro_f, 6),
                "macro_f": round(reports[0].macro_f, 6),
                "coverage": round(reports[0].coverage, 6),
                "labels": reports[0].label_universe_size,
                "training_cves": len(split.train),
                "feedback_records": len(self.feedback),
            }
            created = datetime.now(timezone.utc).isoformat(timespec="seconds")
            return self.registry.store(model, metrics, created)
        finally:
            self._retrain_lock.release()

    # -------------------------------------------------------------- queue

    def review_queue(self, model: HierarchicalModel, model_id: str) -> list[dict]:
        if self._queue_cache is not None and self._queue_cache[0] == model_id:
            items = self._queue_cache[1]
        else:
            active_cwes = {c.id for c in self.snapshot.cwes if c.status == "active"}
            names = {c.id: c.name for c in self.snapshot.cwes}
            items = []
            for cve in self.snapshot.cves:
                if any(w in active_cwes for w in cve.assigned_cwes):
                    continue
                for prediction in model.predict_cwes(cve.description):
                    items.append(
                        {
                            "cve_id": cve.id,
                            "description": cve.description,
                            "cwe": prediction.cwe,
                            "cwe_name": names.get(prediction.cwe, ""),
                            "score": round(prediction.score, 6),
                            "path": prediction.path,
                            "fallback": prediction.fallback,
                        }
                    )
            items.sort(key=lambda i: (i["score"], i["cve_id"], i["cwe"]))
            self._queue_cache = (model_id, items)
        reviewed = self.feedback.reviewed_pairs(model_id)
        return [i for i in items if (i["cve_id"], i["cwe"]) not in reviewed]


def _encode_cursor(model_id: str, key: list) -> str:
    return base64.urlsafe_b64encode(json.dumps({"m": model_id, "k": key}).encode()).decode()


def _decode_cursor(cursor: str) -> dict:
    try:
        return json.loads(base64.urlsafe_b64decode(cursor.encode()))
    except Exception as exc:
        raise HTTPException(status_code=400, detail="malformed cursor") from exc


def create_app(config: ServiceConfig, snapshot: KnowledgeSnapshot | None = None) -> FastAPI:
    state = ServiceState(config, snapshot=snapshot)
    app = FastAPI(title="threatpath", version="1.0")
    app.state.service = state
    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["Authorization", "Content-Type"],
        )

    async def require_token(authorization: str | None = Header(default=None)) -> None:
        if config.api_token is None:
            return
        expected = f"Bearer {config.api_token}"
        if authorization != expected:
            raise HTTPException(status_code=401, detail="missing or invalid token")

    @app.middleware("http")
    async def stamp_headers(request: Request, call_next):
        response: Response = await call_next(request)
        response.headers["X-Snapshot-Id"] = state.snapshot.snapshot_id
        active_id = state.active_id_or_none()
        if active_id:
            response.headers["X-Model-Id"] = active_id
        return response

    dep = [Depends(require_token)]

    @app.get("/v1/health", dependencies=dep)
    def health():
        return {
            "snapshot_id": state.snapshot.snapshot_id,
            "active_model": state.active_id_or_none(),
            "feedback_records": len(state.feedback),
        }

    @app.post("/v1/analyze", dependencies=dep)
    def analyze(request: AnalysisRequest):
        has_cve = bool(request.cve_id)
        has_text = bool(request.description and request.description.strip())
        if has_cve == has_text:  # both or neither
            raise HTTPException(
                status_code=400, detail="provide exactly one of cve_id or description"
            )
        model, model_id = state.active()
        query = request.cve_id if has_cve else request.description
        try:
            chain = analyze_cve(query, model, state.table, state.snapshot)
        except CveNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

        technique_links = [asdict(e) for e in chain.technique_links]
        techniques = chain.techniques
        if request.max_techniques is not None:
            techniques = techniques[: request.max_techniques]
            technique_links = [e for e in technique_links if e["to_id"] in set(techniques)]
        body = {
            "cve": chain.cve,
            "model_id": model_id,
            "snapshot_id": state.snapshot.snapshot_id,
            "cwe_links": [asdict(link) for link in chain.cwe_links],
            "technique_links": technique_links,
            "techniques": techniques,
            "counts": chain.counts(),
        }
        if request.include_actors:
            body["actor_links"] = [asdict(e) for e in chain.actor_links]
            body["actors"] = [
                {"actor": actor, "supporting_techniques": n} for actor, n in rank_actors(chain)
            ]
        return body

    @app.post("/v1/feedback", status_code=201, dependencies=dep)
    def submit_feedback(request: FeedbackRequest):
        model, model_id = state.active()
        if request.verdict not in VERDICTS:
            raise HTTPException(status_code=422, detail=f"verdict must be one of {VERDICTS}")
        if request.verdict == "replace" and request.replacement_cwe is None:
            raise HTTPException(status_code=422, detail="replace verdict requires replacement_cwe")
        known_cwes = {c.id for c in state.snapshot.cwes}
        if request.cve_id not in state.snapshot.cve_index():
            raise HTTPException(status_code=422, detail=f"unknown CVE {request.cve_id}")
        if request.proposed_cwe not in known_cwes:
            raise HTTPException(status_code=422, detail=f"unknown CWE-{request.proposed_cwe}")
        if request.replacement_cwe is not None and request.replacement_cwe not in known_cwes:
            raise HTTPException(status_code=422, detail=f"unknown CWE-{request.replacement_cwe}")
        try:
            record = state.feedback.append(
                cve_id=request.cve_id,
                proposed_cwe=request.proposed_cwe,
                verdict=request.verdict,
                reviewer=request.reviewer,
                model_generation=model_id,
                replacement_cwe=request.replacement_cwe,
            )
        except DuplicateFeedbackError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return asdict(record)

    @app.get("/v1/feedback/{record_id}", dependencies=dep)
    def get_feedback(record_id: int):
        record = state.feedback.get(record_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"no feedback record {record_id}")
        return asdict(record)

    @app.get("/v1/review-queue", dependencies=dep)
    def review_queue(limit: int = Query(default=20, ge=1, le=500), cursor: str | None = None):
        model, model_id = state.active()
        items = state.review_queue(model, model_id)
        if cursor:
            decoded = _decode_cursor(cursor)
            if decoded.get("m") != model_id:
                raise HTTPException(status_code=409, detail="cursor from another model generation")
            key = decoded.get("k", [])
            items = [
                i for i in items if [i["score"], i["cve_id"], i["cwe"]] > key
            ]
        page = items[:limit]
        next_cursor = None
        if len(items) > limit and page:
            last = page[-1]
            next_cursor = _encode_cursor(model_id, [last["score"], last["cve_id"], last["cwe"]])
        return {"items": page, "next_cursor": next_cursor, "pending": len(items)}

    @app.post("/v1/retrain", status_code=201, dependencies=dep)
    def retrain():
        entry = state.retrain()
        return asdict(entry)

    @app.get("/v1/models", dependencies=dep)
    def models():
        return {"models": [asdict(e) for e in state.registry.entries()]}

    @app.post("/v1/models/{model_id}/activate", dependencies=dep)
    def activate(model_id: str):
        entry = state.activate(model_id)
        return asdict(entry)

    @app.get("/v1/cwes", dependencies=dep)
    def search_cwes(q: str = "", limit: int = Query(default=20, ge=1, le=200)):
        needle = q.strip().lower()
        matches = []
        for cwe in state.snapshot.cwes:
            if cwe.status != "active":
                continue
            if not needle or needle in cwe.name.lower() or needle == str(cwe.id):
                matches.append({"id": cwe.id, "name": cwe.name})
            if len(matches) >= limit:
                break
        return {"cwes": matches}

    return app
