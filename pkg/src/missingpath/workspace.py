"""Collection directories: descriptor, artifacts, and the ingest pipeline.

One directory per collection (its name is the collection id) holding
paths.csv, entities.csv, vectors.ndjson, matrix.bin, coordinates.csv,
zones.json and descriptor.json. Ingest runs the stages in order and is
resumable: a stage whose output files already exist is skipped, so a
failed run restarts from its inputs.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .gateway import EndpointConfig, open_endpoint
from .harvest import (
    ENTITIES_FILENAME,
    HarvestConfig,
    harvest,
    load_entities,
    plan_partition,
    save_entities,
)
from .paths import (
    PATHS_FILENAME,
    EnumerationConfig,
    count_all_entities,
    enumerate_paths,
    load_paths,
    prune,
    save_paths,
)
import numpy as np

from .projection import (
    COORDINATES_FILENAME,
    ZONES_FILENAME,
    ProjectedMap,
    ProjectionConfig,
    compute_zones,
    default_color_path,
    load_map,
    project,
    save_map,
)
from .store import (
    MATRIX_FILENAME,
    VECTORS_FILENAME,
    build_vectors,
    load_matrix,
    load_vectors,
    save_matrix,
    save_vectors,
    to_matrix,
)
from .summaries import SummaryConfig, auto_granularity, looks_date_like, summarize
from .terms import uri_tail

DESCRIPTOR_FILENAME = "descriptor.json"

STATUS_PENDING = "pending"
STATUS_HARVESTING = "harvesting"
STATUS_VECTORIZING = "vectorizing"
STATUS_PROJECTING = "projecting"
STATUS_READY = "ready"
STATUS_FAILED = "failed"


@dataclass
class CollectionDescriptor:
    collection_id: str
    class_uri: str
    endpoint_url: str
    max_depth: int = 2
    min_coverage: float = 0.0
    quota: int = 10000
    status: str = STATUS_PENDING
    reason: str | None = None
    entity_count: int = 0
    path_count: int = 0
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def save(self, directory: Path) -> None:
        _atomic_write_text(
            directory / DESCRIPTOR_FILENAME,
            json.dumps(asdict(self), ensure_ascii=False, indent=1),
        )

    @staticmethod
    def load(directory: Path) -> "CollectionDescriptor":
        doc = json.loads((directory / DESCRIPTOR_FILENAME).read_text(encoding="utf-8"))
        return CollectionDescriptor(**doc)


def _atomic_write_text(target: Path, content: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=target.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def collection_id_for(class_uri: str, endpoint_url: str, max_depth: int) -> str:
    digest = hashlib.sha1(
        f"{class_uri}|{endpoint_url}|{max_depth}".encode()
    ).hexdigest()[:8]
    tail = "".join(c if c.isalnum() else "-" for c in uri_tail(class_uri).lower())
    return f"{tail or 'collection'}-{digest}"


class Collection:
    """Lazy, cached view over one collection directory.

    Artifacts are immutable once written, so concurrent readers are safe;
    the map cache is invalidated when a projection job commits.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._lock = threading.RLock()
        self._paths = None
        self._entities = None
        self._store = None
        self._matrix = None
        self._map = None
        self._full_summaries: dict[int, object] = {}
        self._granularities: dict[int, str | None] = {}
        self._summary_cfg = SummaryConfig()

    @property
    def collection_id(self) -> str:
        return self.directory.name

    def descriptor(self) -> CollectionDescriptor:
        return CollectionDescriptor.load(self.directory)

    def is_ready(self) -> bool:
        try:
            return self.descriptor().status == STATUS_READY
        except FileNotFoundError:
            return False

    @property
    def paths(self):
        with self._lock:
            if self._paths is None:
                self._paths = load_paths(self.directory)
            return self._paths

    @property
    def entities(self):
        with self._lock:
            if self._entities is None:
                self._entities = load_entities(self.directory)
            return self._entities

    @property
    def store(self):
        with self._lock:
            if self._store is None:
                self._store = load_vectors(self.directory, self.entities, self.paths)
            return self._store

    @property
    def matrix(self):
        with self._lock:
            if self._matrix is None:
                self._matrix = load_matrix(self.directory)
            return self._matrix

    @property
    def map(self):
        with self._lock:
            if self._map is None:
                self._map = load_map(self.directory)
            return self._map

    def invalidate_map(self) -> None:
        with self._lock:
            self._map = None

    # -- summaries ----------------------------------------------------------

    def granularity_for(self, path_index: int) -> str | None:
        """Date binning decision, made once on the full set so that subset
        summaries stay aligned with the full-set summary."""
        with self._lock:
            if path_index not in self._granularities:
                _, _, keys = self.store.facet_occurrences(path_index, "values")
                if looks_date_like(keys):
                    ent, codes, keys2 = self.store.facet_occurrences(path_index, "values")
                    flat = [keys2[c] for c in codes]
                    self._granularities[path_index] = auto_granularity(
                        flat, self._summary_cfg
                    )
                else:
                    self._granularities[path_index] = None
            return self._granularities[path_index]

    def full_summary(self, path_index: int):
        with self._lock:
            cached = self._full_summaries.get(path_index)
            if cached is None:
                cached = summarize(
                    range(self.store.n_entities),
                    path_index,
                    self.store,
                    self._summary_cfg,
                    granularity=self.granularity_for(path_index),
                )
                self._full_summaries[path_index] = cached
            return cached

    def full_summaries(self):
        return [self.full_summary(p.index) for p in self.paths]

    def subset_summary(self, path_index: int, entity_ids):
        return summarize(
            entity_ids,
            path_index,
            self.store,
            self._summary_cfg,
            granularity=self.granularity_for(path_index),
        )

    def color_path(self) -> int | None:
        return default_color_path(self.full_summaries())


@dataclass
class IngestSettings:
    class_uri: str
    endpoint: EndpointConfig
    max_depth: int = 2
    min_coverage: float = 0.0
    harvest: HarvestConfig = field(default_factory=HarvestConfig)
    projection: ProjectionConfig = field(default_factory=ProjectionConfig)


def ingest(
    data_dir: str | Path,
    collection_id: str,
    settings: IngestSettings,
    progress=None,
    should_cancel=None,
) -> CollectionDescriptor:
    """Run (or resume) the full pipeline for one collection.

    Raises on failure after recording status=failed with the reason in the
    descriptor; completed stages are kept and reused on the next attempt.
    """
    directory = Path(data_dir) / collection_id
    directory.mkdir(parents=True, exist_ok=True)

    def report(fraction: float) -> None:
        if progress is not None:
            progress(fraction)

    try:
        descriptor = CollectionDescriptor.load(directory)
        descriptor.reason = None
    except FileNotFoundError:
        descriptor = CollectionDescriptor(
            collection_id=collection_id,
            class_uri=settings.class_uri,
            endpoint_url=settings.endpoint.base_url,
            max_depth=settings.max_depth,
            min_coverage=settings.min_coverage,
            quota=settings.endpoint.quota,
        )
    descriptor.save(directory)

    try:
        gateway = open_endpoint(settings.endpoint)
        total = count_all_entities(gateway, settings.class_uri)

        descriptor.status = STATUS_HARVESTING
        descriptor.save(directory)
        if (directory / PATHS_FILENAME).exists():
            paths = load_paths(directory)
        else:
            enum_cfg = EnumerationConfig(
                class_uri=settings.class_uri,
                max_depth=settings.max_depth,
                min_coverage=settings.min_coverage,
            )
            paths = prune(
                enumerate_paths(enum_cfg, gateway, total), settings.min_coverage
            )
            save_paths(paths, directory)
        descriptor.path_count = len(paths)
        report(0.15)

        if (directory / ENTITIES_FILENAME).exists():
            entities = load_entities(directory)
        else:
            plan = plan_partition(
                paths, settings.harvest, gateway, settings.class_uri, total
            )
            entities = harvest(plan, settings.class_uri, gateway)
            save_entities(entities, directory)
        descriptor.entity_count = len(entities)
        descriptor.save(directory)
        report(0.4)

        descriptor.status = STATUS_VECTORIZING
        descriptor.save(directory)
        if (directory / VECTORS_FILENAME).exists() and (directory / MATRIX_FILENAME).exists():
            store = load_vectors(directory, entities, paths)
            matrix = load_matrix(directory)
        else:
            store = build_vectors(entities, paths, gateway, settings.class_uri)
            matrix = to_matrix(store)
            save_vectors(store, directory)
            save_matrix(matrix, directory)
        report(0.7)

        descriptor.status = STATUS_PROJECTING
        descriptor.save(directory)
        if not (
            (directory / COORDINATES_FILENAME).exists()
            and (directory / ZONES_FILENAME).exists()
        ):
            if len(paths) >= 2:
                run_projection(directory, matrix, settings.projection,
                               progress=lambda f: report(0.7 + 0.29 * f),
                               should_cancel=should_cancel)
            else:
                # Too few paths to embed: a flat map keeps the surface usable.
                flat = ProjectedMap(
                    coordinates=np.zeros((len(entities), 2)),
                    zones=[],
                    config_used=settings.projection,
                )
                save_map(flat, directory)

        descriptor.status = STATUS_READY
        descriptor.reason = None
        descriptor.save(directory)
        report(1.0)
        return descriptor
    except Exception as exc:
        descriptor.status = STATUS_FAILED
        descriptor.reason = str(exc)
        descriptor.save(directory)
        raise


def run_projection(
    directory: Path,
    matrix,
    cfg: ProjectionConfig,
    min_members: int = 5,
    progress=None,
    should_cancel=None,
) -> None:
    """Project + zone + commit atomically (readers keep the old map until
    both files are swapped in)."""
    projected = project(matrix, cfg, progress=progress, should_cancel=should_cancel)
    projected.zones = compute_zones(projected, matrix, min_members=min_members)
    with tempfile.TemporaryDirectory(dir=directory) as tmp:
        tmp_path = Path(tmp)
        save_map(projected, tmp_path)
        os.replace(tmp_path / COORDINATES_FILENAME, directory / COORDINATES_FILENAME)
        os.replace(tmp_path / ZONES_FILENAME, directory / ZONES_FILENAME)


class Workspace:
    """All collections under one data directory."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._collections: dict[str, Collection] = {}
        self._lock = threading.RLock()

    def collection_ids(self) -> list[str]:
        ids = [
            p.name
            for p in self.data_dir.iterdir()
            if p.is_dir() and (p / DESCRIPTOR_FILENAME).exists()
        ]
        return sorted(ids)

    def get(self, collection_id: str) -> Collection:
        with self._lock:
            collection = self._collections.get(collection_id)
            if collection is None:
                directory = self.data_dir / collection_id
                if not (directory / DESCRIPTOR_FILENAME).exists():
                    raise KeyError(collection_id)
                collection = Collection(directory)
                self._collections[collection_id] = collection
            return collection

    def register(self, collection_id: str) -> Collection:
        with self._lock:
            if collection_id not in self._collections:
                self._collections[collection_id] = Collection(
                    self.data_dir / collection_id
                )
            return self._collections[collection_id]
