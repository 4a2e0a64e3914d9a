"""Per-entity, per-path value vectors and the boolean completeness matrix.

Each entity is a vector with one cell per path. A cell is either ABSENT
(the entity has no value at the end of that path) or three aligned lists:
values, plus datatypes/languages when the data expresses them. The
completeness matrix flips that around: bit 1 marks a missing path.

The store is write-once during ingest, then immutable; summary and
selection code read it concurrently.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IntegrityError, StoreFormatError
from .gateway import Gateway, QueryKind, StructuredQuery
from .harvest import EntityIndex
from .paths import PathPattern
from .terms import RDF_LANGSTRING, XSD_STRING

VECTORS_FILENAME = "vectors.ndjson"
MATRIX_FILENAME = "matrix.bin"
_VECTORS_FORMAT = "missingpath-vectors"
_VECTORS_VERSION = 1
_MATRIX_MAGIC = b"MPMX"
_MATRIX_VERSION = 1

FACETS = ("values", "datatypes", "languages")


@dataclass(frozen=True)
class PathCell:
    """Present cell: values with positionally aligned descriptors.

    ``datatypes``/``languages`` are None unless at least one value carries
    one; inside the lists, values without a descriptor hold None.
    """

    values: tuple[str, ...]
    datatypes: tuple[str | None, ...] | None = None
    languages: tuple[str | None, ...] | None = None

    def facet(self, name: str) -> tuple:
        if name == "values":
            return self.values
        entries = getattr(self, name)
        return tuple(e for e in (entries or ()) if e is not None)


ABSENT = None  # distinguished marker: a missing cell is stored as None


@dataclass
class CompletenessMatrix:
    bits: np.ndarray  # uint8, shape (n_entities, n_paths); 1 = path missing
    n_paths: int

    @property
    def n_entities(self) -> int:
        return self.bits.shape[0]

    def row(self, entity_id: int) -> np.ndarray:
        return self.bits[entity_id]

    def column_covered_counts(self) -> np.ndarray:
        """Entities covered per path (bit 0 means present)."""
        return (self.bits == 0).sum(axis=0)


@dataclass
class EntityVectorStore:
    entity_index: EntityIndex
    paths: list[PathPattern]
    by_entity: list[list[PathCell | None]]
    _facet_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EntityVectorStore):
            return NotImplemented
        return (
            self.entity_index.entries == other.entity_index.entries
            and self.paths == other.paths
            and self.by_entity == other.by_entity
        )

    @property
    def n_entities(self) -> int:
        return len(self.by_entity)

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    def cell(self, entity_id: int, path_index: int) -> PathCell | None:
        return self.by_entity[entity_id][path_index]

    def facet_occurrences(self, path_index: int, facet: str):
        """Flat occurrence arrays for one path facet, built once and cached.

        Returns ``(entity_ids, codes, keys)`` where every value occurrence
        contributes one (entity, key-code) pair; multi-valued entities
        contribute multiply.
        """
        cache_key = (path_index, facet)
        cached = self._facet_cache.get(cache_key)
        if cached is not None:
            return cached
        ids: list[int] = []
        codes: list[int] = []
        vocab: dict[str, int] = {}
        keys: list[str] = []
        for eid, vector in enumerate(self.by_entity):
            cell = vector[path_index]
            if cell is None:
                continue
            for key in cell.facet(facet):
                code = vocab.get(key)
                if code is None:
                    code = len(keys)
                    vocab[key] = code
                    keys.append(key)
                ids.append(eid)
                codes.append(code)
        result = (
            np.asarray(ids, dtype=np.int32),
            np.asarray(codes, dtype=np.int32),
            keys,
        )
        self._facet_cache[cache_key] = result
        return result


def build_vectors(
    entities: EntityIndex,
    paths: list[PathPattern],
    gateway: Gateway,
    class_uri: str,
) -> EntityVectorStore:
    """Fill the store by retrieving terminal values for every path."""
    quota = gateway.cfg.quota
    vectors: list[list[PathCell | None]] = [[ABSENT] * len(paths) for _ in entities.entries]
    raw: list[list[tuple[list, list, list]]] = [
        [None] * len(paths) for _ in entities.entries  # type: ignore[list-item]
    ]

    queries = [
        StructuredQuery(
            kind=QueryKind.TERMINAL_VALUES_FOR_ALL_ENTITIES,
            class_uri=class_uri,
            path=p.predicates,
        )
        for p in paths
    ]
    for path_pos, table in enumerate(gateway.execute_many(queries)):
        if len(table) >= quota:
            raise IntegrityError(
                f"terminal values for path {paths[path_pos].label} hit the quota "
                f"({quota}); raise the quota to vectorize this collection"
            )
        for entity, value, datatype, language in table.rows:
            eid = entities.id_of(entity.text)
            if eid is None:
                raise IntegrityError(f"endpoint returned unknown entity {entity.text}")
            slot = raw[eid][path_pos]
            if slot is None:
                slot = ([], [], [])
                raw[eid][path_pos] = slot
            slot[0].append(value.text)
            dt = datatype.text if datatype is not None else None
            if dt in (XSD_STRING, RDF_LANGSTRING):
                dt = None  # implicit datatypes are not "expressed in the data"
            slot[1].append(dt)
            lang = language.text if language is not None and language.text else None
            slot[2].append(lang)

    for eid, per_path in enumerate(raw):
        for path_pos, slot in enumerate(per_path):
            if slot is None:
                continue
            values, datatypes, languages = slot
            vectors[eid][path_pos] = PathCell(
                values=tuple(values),
                datatypes=tuple(datatypes) if any(d is not None for d in datatypes) else None,
                languages=tuple(languages) if any(l is not None for l in languages) else None,
            )
    return EntityVectorStore(entity_index=entities, paths=paths, by_entity=vectors)


def to_matrix(store: EntityVectorStore) -> CompletenessMatrix:
    """Boolean entities-by-paths matrix; 1 marks an ABSENT cell."""
    bits = np.zeros((store.n_entities, store.n_paths), dtype=np.uint8)
    for eid, vector in enumerate(store.by_entity):
        for path_pos, cell in enumerate(vector):
            if cell is None:
                bits[eid, path_pos] = 1
    return CompletenessMatrix(bits=bits, n_paths=store.n_paths)


# -- persistence ---------------------------------------------------------------


def _cell_to_json(cell: PathCell | None):
    if cell is None:
        return None
    return [
        list(cell.values),
        list(cell.datatypes) if cell.datatypes is not None else None,
        list(cell.languages) if cell.languages is not None else None,
    ]


def _cell_from_json(doc, entity_id: int) -> PathCell | None:
    if doc is None:
        return None
    try:
        values, datatypes, languages = doc
        if not isinstance(values, list) or not values:
            raise ValueError("cell values must be a non-empty list")
        for aligned in (datatypes, languages):
            if aligned is not None and len(aligned) != len(values):
                raise ValueError("descriptor list misaligned with values")
    except (TypeError, ValueError) as exc:
        raise StoreFormatError(f"corrupted cell for entity {entity_id}: {exc}") from exc
    return PathCell(
        values=tuple(values),
        datatypes=tuple(datatypes) if datatypes is not None else None,
        languages=tuple(languages) if languages is not None else None,
    )


def save_vectors(store: EntityVectorStore, directory: str | Path) -> Path:
    target = Path(directory) / VECTORS_FILENAME
    with open(target, "w", encoding="utf-8") as fh:
        header = {
            "format": _VECTORS_FORMAT,
            "version": _VECTORS_VERSION,
            "n_entities": store.n_entities,
            "n_paths": store.n_paths,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for eid, vector in enumerate(store.by_entity):
            record = {"id": eid, "cells": [_cell_to_json(c) for c in vector]}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return target


def load_vectors(
    directory: str | Path, entities: EntityIndex, paths: list[PathPattern]
) -> EntityVectorStore:
    target = Path(directory) / VECTORS_FILENAME
    with open(target, encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except ValueError as exc:
            raise StoreFormatError(f"unreadable vectors header: {exc}") from exc
        if header.get("format") != _VECTORS_FORMAT:
            raise StoreFormatError(f"{target} is not a vectors file")
        if header.get("version") != _VECTORS_VERSION:
            raise StoreFormatError(
                f"vectors version {header.get('version')} needs migration "
                f"(expected {_VECTORS_VERSION})"
            )
        n_paths = header.get("n_paths")
        if n_paths != len(paths):
            raise StoreFormatError(
                f"vectors were built over {n_paths} paths, got {len(paths)}"
            )
        by_entity: list[list[PathCell | None]] = []
        for line in fh:
            try:
                record = json.loads(line)
                eid = record["id"]
                cells = record["cells"]
            except (ValueError, KeyError, TypeError) as exc:
                raise StoreFormatError(
                    f"corrupted vectors row after entity {len(by_entity) - 1}: {exc}"
                ) from exc
            if eid != len(by_entity):
                raise StoreFormatError(f"entity {eid}: rows out of order")
            if len(cells) != len(paths):
                raise StoreFormatError(
                    f"entity {eid}: expected {len(paths)} cells, found {len(cells)}"
                )
            by_entity.append([_cell_from_json(c, eid) for c in cells])
    if len(by_entity) != len(entities):
        raise StoreFormatError(
            f"vectors hold {len(by_entity)} entities, index holds {len(entities)}"
        )
    return EntityVectorStore(entity_index=entities, paths=paths, by_entity=by_entity)


def save_matrix(matrix: CompletenessMatrix, directory: str | Path) -> Path:
    target = Path(directory) / MATRIX_FILENAME
    packed = np.packbits(matrix.bits, axis=1, bitorder="little")
    with open(target, "wb") as fh:
        fh.write(_MATRIX_MAGIC)
        fh.write(struct.pack("<HII", _MATRIX_VERSION, matrix.n_entities, matrix.n_paths))
        fh.write(packed.tobytes())
    return target


def load_matrix(directory: str | Path) -> CompletenessMatrix:
    target = Path(directory) / MATRIX_FILENAME
    blob = Path(target).read_bytes()
    if blob[:4] != _MATRIX_MAGIC:
        raise StoreFormatError(f"{target} is not a matrix file")
    version, n_entities, n_paths = struct.unpack("<HII", blob[4:14])
    if version != _MATRIX_VERSION:
        raise StoreFormatError(f"matrix version {version} needs migration")
    row_bytes = (n_paths + 7) // 8
    expected = 14 + row_bytes * n_entities
    if len(blob) != expected:
        raise StoreFormatError(f"matrix payload is {len(blob)} bytes, expected {expected}")
    packed = np.frombuffer(blob[14:], dtype=np.uint8).reshape(n_entities, row_bytes)
    bits = np.unpackbits(packed, axis=1, bitorder="little")[:, :n_paths]
    return CompletenessMatrix(bits=np.ascontiguousarray(bits), n_paths=n_paths)
