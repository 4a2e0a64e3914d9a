"""HTTP JSON service: ingest, map, summaries, selection, export, logging.

The selection API is stateless -- clients send the full query (plus the
current selection ids when scoped) on every call. All GET routes are
side-effect free.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Literal

import requests
from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import __version__
from .errors import ValidationError
from .export import export as build_export
from .gateway import EndpointConfig
from .jobs import JobManager
from .projection import ProjectionConfig
from .selection import (
    Condition,
    ConditionKind,
    Scope,
    Selection,
    SelectionQuery,
    remove_entities,
    resolve,
    resolve_labels,
    to_pseudocode,
)
from .summaries import FACETS, compare
from .workspace import (
    Collection,
    IngestSettings,
    Workspace,
    collection_id_for,
    ingest,
    run_projection,
)

ACTIONS = (
    "add_condition",
    "remove_condition",
    "retrieve_subset",
    "compute_projection",
    "clear_selection",
    "load_collection",
    "select_color",
)
LOG_FILENAME = "actions.ndjson"


# -- wire models -----------------------------------------------------------------


class CreateCollectionBody(BaseModel):
    class_uri: str
    endpoint_url: str | None = None
    fixture: str | None = None
    max_depth: int = Field(default=2, ge=1)
    quota: int = Field(default=10000, ge=1)
    min_coverage: float = Field(default=0.0, ge=0.0)


class ConditionBody(BaseModel):
    kind: Literal["zone", "lasso", "path", "value"]
    negated: bool = False
    path_index: int | None = None
    present: bool = True
    facet: Literal["values", "datatypes", "languages"] = "values"
    bucket_key: str | None = None
    member_keys: list[str] | None = None
    is_other: bool = False
    zone_id: int | None = None
    polygon: list[tuple[float, float]] | None = None


class SelectionQueryBody(BaseModel):
    conditions: list[ConditionBody]
    scope: Literal["whole_set", "current_selection"] = "whole_set"
    current_ids: list[int] | None = None


class InspectBody(SelectionQueryBody):
    preferred_language: str = "en"


class ProjectionBody(BaseModel):
    selected_path_indices: list[int] | None = None
    n_neighbors: int = Field(default=15, ge=2)
    min_dist: float = Field(default=0.1, ge=0.0)
    n_epochs: int = Field(default=200, ge=1)
    seed: int = 42


class ExportBody(BaseModel):
    query: SelectionQueryBody | None = None
    entity_ids: list[int] | None = None
    preferred_language: str = "en"


class ActionLogBody(BaseModel):
    session_id: str
    action: str
    timestamp: str
    payload_digest: str = ""


def _to_condition(body: ConditionBody) -> Condition:
    try:
        return Condition(
            kind=ConditionKind(body.kind),
            negated=body.negated,
            path_index=body.path_index,
            present=body.present,
            facet=body.facet,
            bucket_key=body.bucket_key,
            member_keys=tuple(body.member_keys) if body.member_keys is not None else None,
            is_other=body.is_other,
            zone_id=body.zone_id,
            polygon=tuple((float(x), float(y)) for x, y in body.polygon)
            if body.polygon
            else None,
        )
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _to_query(body: SelectionQueryBody) -> SelectionQuery:
    if not body.conditions:
        raise HTTPException(status_code=422, detail="conditions must not be empty")
    return SelectionQuery(
        conditions=tuple(_to_condition(c) for c in body.conditions),
        scope=Scope(body.scope),
    )


def _facet_doc(facet_summary) -> dict:
    return {
        "buckets": [
            {
                "key": b.key,
                "count": b.count,
                "member_keys": list(b.member_keys) if b.member_keys else None,
            }
            for b in facet_summary.buckets
        ],
        "other_count": facet_summary.other_count,
        "other_keys": list(facet_summary.other_keys),
        "total": facet_summary.total,
        "unique_count": facet_summary.unique_count,
    }


def _summary_doc(summary) -> dict:
    return {
        "path_index": summary.path_index,
        "entity_count": summary.entity_count,
        "completeness_in_set": summary.completeness_in_set,
        "unique_value_count": summary.unique_value_count,
        "facets": {facet: _facet_doc(summary.facet(facet)) for facet in FACETS},
    }


def create_app(
    data_dir: str | Path,
    cors_origins: list[str] | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    workspace = Workspace(data_dir)
    jobs = JobManager()
    log_path = Path(data_dir) / LOG_FILENAME
    log_lock = threading.Lock()

    app = FastAPI(title="missingpath", version=__version__)
    app.state.workspace = workspace
    app.state.jobs = jobs
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def get_collection(collection_id: str) -> Collection:
        try:
            return workspace.get(collection_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown collection {collection_id}")

    def require_ready(collection: Collection) -> None:
        descriptor = collection.descriptor()
        if descriptor.status != "ready":
            raise HTTPException(
                status_code=409,
                detail={"status": descriptor.status, "reason": descriptor.reason},
            )

    # -- collections ------------------------------------------------------------

    @app.post("/collections", status_code=202)
    def create_collection(body: CreateCollectionBody):
        source = body.endpoint_url or body.fixture
        if not source:
            raise HTTPException(status_code=422, detail="endpoint_url or fixture required")
        endpoint = EndpointConfig(base_url=source, quota=body.quota)
        resolved = endpoint.resolved_url()
        if resolved.startswith(("http://", "https://")):
            # cheap reachability probe; any HTTP answer (even 405) is fine
            try:
                requests.head(resolved, timeout=3.0)
            except requests.RequestException as exc:
                raise HTTPException(
                    status_code=503, detail=f"endpoint unreachable: {exc}"
                ) from exc
        elif not Path(resolved).exists():
            raise HTTPException(status_code=503, detail=f"fixture not found: {resolved}")
        collection_id = collection_id_for(body.class_uri, source, body.max_depth)
        settings = IngestSettings(
            class_uri=body.class_uri,
            endpoint=endpoint,
            max_depth=body.max_depth,
            min_coverage=body.min_coverage,
        )

        def run(job):
            try:
                ingest(
                    workspace.data_dir,
                    collection_id,
                    settings,
                    progress=lambda f: setattr(job, "progress", f),
                    should_cancel=job.cancel_requested,
                )
            finally:
                workspace.register(collection_id).invalidate_map()

        job = jobs.submit_ingest(collection_id, run)
        return {"collection_id": collection_id, "job_id": job.job_id}

    @app.get("/collections")
    def list_collections():
        out = []
        for collection_id in workspace.collection_ids():
            descriptor = workspace.get(collection_id).descriptor()
            out.append(descriptor.__dict__)
        return out

    @app.get("/collections/{collection_id}")
    def get_descriptor(collection_id: str):
        collection = get_collection(collection_id)
        return collection.descriptor().__dict__

    @app.get("/collections/{collection_id}/paths")
    def get_paths(collection_id: str):
        collection = get_collection(collection_id)
        require_ready(collection)
        return [
            {
                "index": p.index,
                "predicates": list(p.predicates),
                "depth": p.depth,
                "covered_count": p.covered_count,
                "completeness": p.completeness,
                "label": p.label,
            }
            for p in collection.paths
        ]

    @app.get("/collections/{collection_id}/summaries")
    def get_summaries(collection_id: str, path_index: int | None = Query(default=None)):
        collection = get_collection(collection_id)
        require_ready(collection)
        if path_index is not None:
            if not (0 <= path_index < len(collection.paths)):
                raise HTTPException(status_code=404, detail=f"unknown path {path_index}")
            return _summary_doc(collection.full_summary(path_index))
        return [_summary_doc(s) for s in collection.full_summaries()]

    @app.get("/collections/{collection_id}/map")
    def get_map(collection_id: str):
        collection = get_collection(collection_id)
        require_ready(collection)
        projected = collection.map
        color_path = collection.color_path()
        color = None
        if color_path is not None:
            summary = collection.full_summary(color_path)
            keys = [b.key for b in summary.values.buckets]
            bucket_docs = [
                {"key": b.key, "count": b.count, "is_other": False}
                for b in summary.values.buckets
            ]
            other_index = None
            other_keys = set()
            if summary.values.other_count > 0:
                other_index = len(bucket_docs)
                other_keys = set(summary.values.other_keys)
                bucket_docs.append(
                    {"key": "other", "count": summary.values.other_count, "is_other": True}
                )
            key_to_bucket = {k: i for i, k in enumerate(keys)}
            member_map = {}
            for i, b in enumerate(summary.values.buckets):
                for raw in b.member_keys or ():
                    member_map[raw] = i
            entity_buckets = []
            for eid in range(collection.store.n_entities):
                cell = collection.store.cell(eid, color_path)
                hit: set[int] = set()
                if cell is not None:
                    for value in cell.values:
                        bucket = key_to_bucket.get(value)
                        if bucket is None:
                            bucket = member_map.get(value)
                        if bucket is None and other_index is not None and value in other_keys:
                            bucket = other_index
                        if bucket is not None:
                            hit.add(bucket)
                entity_buckets.append(sorted(hit))
            color = {
                "path_index": color_path,
                "buckets": bucket_docs,
                "entity_buckets": entity_buckets,
            }
        return {
            "coordinates": [[float(x), float(y)] for x, y in projected.coordinates],
            "zones": [
                {
                    "zone_id": z.zone_id,
                    "member_ids": z.member_entity_ids,
                    "boundary": [[float(x), float(y)] for x, y in z.boundary],
                    "missing_path_indices": z.missing_path_indices,
                }
                for z in projected.zones
            ],
            "default_color_path": color_path,
            "color": color,
        }

    # -- projection jobs ----------------------------------------------------------

    @app.post("/collections/{collection_id}/projection")
    def request_projection(collection_id: str, body: ProjectionBody, response: Response):
        collection = get_collection(collection_id)
        require_ready(collection)
        try:
            cfg = ProjectionConfig(
                selected_path_indices=tuple(body.selected_path_indices)
                if body.selected_path_indices
                else None,
                n_neighbors=body.n_neighbors,
                min_dist=body.min_dist,
                n_epochs=body.n_epochs,
                seed=body.seed,
            )
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if cfg.selected_path_indices is not None and max(cfg.selected_path_indices) >= len(
            collection.paths
        ):
            raise HTTPException(status_code=422, detail="selected path index out of range")

        def run(job):
            run_projection(
                collection.directory,
                collection.matrix,
                cfg,
                progress=lambda f: setattr(job, "progress", f),
                should_cancel=job.cancel_requested,
            )
            collection.invalidate_map()

        job, running = jobs.submit_projection(collection_id, run)
        if running is not None:
            # Superseding policy: the request is queued behind the running
            # job (replacing any previously queued one).
            response.status_code = 409
            return {
                "job_id": job.job_id,
                "status": job.status,
                "running_job_id": running.job_id,
            }
        response.status_code = 202
        return {"job_id": job.job_id, "status": job.status}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
        return job.to_dict()

    # -- selection ----------------------------------------------------------------

    def _resolve_body(collection: Collection, body: SelectionQueryBody) -> Selection:
        query = _to_query(body)
        current = None
        if query.scope is Scope.CURRENT_SELECTION:
            if body.current_ids is None:
                raise HTTPException(
                    status_code=422, detail="current_ids required for current_selection scope"
                )
            current = Selection(query_used=query, entity_ids=list(body.current_ids))
        try:
            return resolve(query, collection.store, collection.map, current)
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.post("/collections/{collection_id}/selection/inspect")
    def inspect(collection_id: str, body: InspectBody):
        collection = get_collection(collection_id)
        require_ready(collection)
        selection = _resolve_body(collection, body)
        ids = selection.entity_ids
        summaries = []
        flags = []
        for p in collection.paths:
            full = collection.full_summary(p.index)
            subset = collection.subset_summary(p.index, ids)
            summaries.append(subset)
            flags.append(compare(full, subset))
        return {
            "count": len(ids),
            "entity_ids": ids,
            "labels": [
                {"uri": u, "label": l}
                for u, l in resolve_labels(ids, collection.store, body.preferred_language)
            ],
            "pseudocode": to_pseudocode(selection.query_used, collection.store),
            "summaries": [_summary_doc(s) for s in summaries],
            "flags": [
                {
                    "path_index": f.path_index,
                    "missing_in_subset": f.missing_in_subset,
                    "significantly_different": f.significantly_different,
                    "ks": [
                        {"facet": r.facet, "statistic": r.statistic, "p_value": r.p_value}
                        for r in f.ks_results
                    ],
                }
                for f in flags
            ],
        }

    @app.post("/collections/{collection_id}/export")
    def export_selection(collection_id: str, body: ExportBody):
        collection = get_collection(collection_id)
        require_ready(collection)
        if body.query is not None:
            selection = _resolve_body(collection, body.query)
            if body.entity_ids is not None:
                keep = set(body.entity_ids)
                removed = [e for e in selection.entity_ids if e not in keep]
                selection = remove_entities(selection, removed)
        elif body.entity_ids is not None:
            ids = sorted(set(body.entity_ids))
            for eid in ids:
                if not (0 <= eid < collection.store.n_entities):
                    raise HTTPException(status_code=422, detail=f"unknown entity id {eid}")
            selection = Selection(
                query_used=SelectionQuery(conditions=(), scope=Scope.WHOLE_SET),
                entity_ids=ids,
            )
        else:
            raise HTTPException(status_code=422, detail="query or entity_ids required")
        full = [collection.full_summary(p.index) for p in collection.paths]
        subset = [
            collection.subset_summary(p.index, selection.entity_ids)
            for p in collection.paths
        ]
        bundle = build_export(
            selection, full, subset, collection.store, collection_id,
            preferred_language=body.preferred_language,
        )
        return Response(
            content=bundle.as_zip(),
            media_type="application/zip",
            headers={"Content-Disposition": f'attachment; filename="{bundle.filename()}"'},
        )

    # -- action log -----------------------------------------------------------------

    @app.post("/log", status_code=204)
    def append_log(body: ActionLogBody):
        if body.action not in ACTIONS:
            raise HTTPException(
                status_code=422,
                detail=f"unknown action {body.action!r}; expected one of {ACTIONS}",
            )
        entry = body.model_dump()
        with log_lock:
            with open(log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
        return Response(status_code=204)

    @app.get("/log")
    def read_log(session: str | None = Query(default=None)):
        entries = []
        if log_path.exists():
            with log_lock:
                text = log_path.read_text(encoding="utf-8")
            for line in text.splitlines():
                if not line.strip():
                    continue
                entry = json.loads(line)
                if session is None or entry.get("session_id") == session:
                    entries.append(entry)
        return entries

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(data_dir: str | Path, port: int, host: str = "127.0.0.1") -> None:
    import uvicorn

    static = Path("frontend") / "dist"
    uvicorn.run(
        create_app(data_dir, static_dir=static if static.is_dir() else None),
        host=host,
        port=port,
        log_level="info",
    )
