"""Vector store: cell structure, matrix derivation, persistence."""

from __future__ import annotations

import pytest

from fixturegen import random_collection
from missingpath.errors import IntegrityError, StoreFormatError
from missingpath.gateway import EndpointConfig, Gateway
from missingpath.harvest import HarvestConfig, harvest, plan_partition
from missingpath.paths import EnumerationConfig, enumerate_paths
from missingpath.store import (
    PathCell,
    build_vectors,
    load_matrix,
    load_vectors,
    save_matrix,
    save_vectors,
    to_matrix,
)

EX = "http://example.org/"
BOOK = EX + "Book"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


def ingest_fixture(path, class_uri, quota=10000, max_depth=2):
    gw = Gateway(EndpointConfig(base_url=str(path), quota=quota))
    paths = enumerate_paths(EnumerationConfig(class_uri=class_uri, max_depth=max_depth), gw)
    plan = plan_partition(paths, HarvestConfig(), gw, class_uri)
    entities = harvest(plan, class_uri, gw)
    store = build_vectors(entities, paths, gw, class_uri)
    return store, gw


@pytest.fixture(scope="module")
def labels_fixture(tmp_path_factory):
    """One entity with two language-tagged labels, one with a typed date,
    one with nothing but a bare predicate-less presence."""
    text = f"""
<{EX}e1> <{RDF_TYPE}> <{BOOK}> .
<{EX}e1> <{EX}label> "À la recherche du temps perdu"@fr .
<{EX}e1> <{EX}label> "In Search of Lost Time"@en .
<{EX}e2> <{RDF_TYPE}> <{BOOK}> .
<{EX}e2> <{EX}published> "1998"^^<http://www.w3.org/2001/XMLSchema#dateTime> .
<{EX}e3> <{RDF_TYPE}> <{BOOK}> .
"""
    target = tmp_path_factory.mktemp("labels") / "labels.nt"
    target.write_text(text, encoding="utf-8")
    return target


class TestBuildVectors:
    def test_multilingual_label_cell(self, labels_fixture):
        store, _ = ingest_fixture(labels_fixture, BOOK)
        label_path = next(p for p in store.paths if p.predicates == (EX + "label",))
        eid = store.entity_index.id_of(EX + "e1")
        cell = store.cell(eid, label_path.index)
        assert cell.values == ("À la recherche du temps perdu", "In Search of Lost Time")
        assert cell.datatypes is None
        assert cell.languages == ("fr", "en")

    def test_typed_date_cell(self, labels_fixture):
        store, _ = ingest_fixture(labels_fixture, BOOK)
        date_path = next(p for p in store.paths if p.predicates == (EX + "published",))
        eid = store.entity_index.id_of(EX + "e2")
        cell = store.cell(eid, date_path.index)
        assert cell.values == ("1998",)
        assert cell.datatypes == ("http://www.w3.org/2001/XMLSchema#dateTime",)
        assert cell.languages is None

    def test_uncovered_entity_is_all_absent(self, labels_fixture):
        store, _ = ingest_fixture(labels_fixture, BOOK)
        eid = store.entity_index.id_of(EX + "e3")
        assert all(cell is None for cell in store.by_entity[eid])

    def test_quota_saturated_values_rejected(self, tmp_path):
        # Harvest fits under the quota (3 entities < 4) but one path has 4
        # value occurrences, so its terminal-values result saturates.
        lines = []
        for i in range(3):
            lines.append(f"<{EX}e{i}> <{RDF_TYPE}> <{BOOK}> .")
        for v in range(4):
            lines.append(f'<{EX}e0> <{EX}tag> "t{v}" .')
        target = tmp_path / "saturated.nt"
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(IntegrityError, match="quota"):
            ingest_fixture(target, BOOK, quota=4)


class TestMatrix:
    def test_bit_semantics(self):
        cell = PathCell(values=("x",))
        from missingpath.harvest import EntityIndex
        from missingpath.paths import PathPattern

        paths = [
            PathPattern(i, (f"{EX}p{i}",), 1, 1.0, 1, f"p{i}") for i in range(3)
        ]
        index = EntityIndex()
        index.add(EX + "e0")
        from missingpath.store import EntityVectorStore

        store = EntityVectorStore(
            entity_index=index, paths=paths, by_entity=[[cell, None, cell]]
        )
        matrix = to_matrix(store)
        assert matrix.bits.tolist() == [[0, 1, 0]]

    def test_all_present_row_is_zero(self, labels_fixture):
        store, _ = ingest_fixture(labels_fixture, BOOK)
        matrix = to_matrix(store)
        assert set(matrix.bits.ravel().tolist()) <= {0, 1}

    def test_four_books_author_column(self, four_books_path):
        store, _ = ingest_fixture(four_books_path, BOOK)
        matrix = to_matrix(store)
        author_path = next(p for p in store.paths if p.predicates == (EX + "author",))
        column = matrix.bits[:, author_path.index]
        assert column.sum() == 1
        missing_id = int(column.argmax())
        assert store.entity_index.entries[missing_id][0] == EX + "b4"

    def test_column_completeness_matches_enumeration(self, tmp_path):
        for seed in (5, 21):
            text, class_uri = random_collection(seed, n_entities=80)
            target = tmp_path / f"m{seed}.nt"
            target.write_text(text, encoding="utf-8")
            store, _ = ingest_fixture(target, class_uri)
            matrix = to_matrix(store)
            covered = matrix.column_covered_counts()
            for p in store.paths:
                assert int(covered[p.index]) == p.covered_count

    def test_density_identity(self, tmp_path):
        text, class_uri = random_collection(11, n_entities=60)
        target = tmp_path / "d.nt"
        target.write_text(text, encoding="utf-8")
        store, _ = ingest_fixture(target, class_uri)
        matrix = to_matrix(store)
        total = store.n_entities
        expected = sum(total - p.covered_count for p in store.paths)
        assert int(matrix.bits.sum()) == expected


class TestPersistence:
    def test_round_trip_identity(self, tmp_path, four_books_path):
        store, _ = ingest_fixture(four_books_path, BOOK)
        save_vectors(store, tmp_path)
        loaded = load_vectors(tmp_path, store.entity_index, store.paths)
        assert loaded == store
        matrix = to_matrix(store)
        save_matrix(matrix, tmp_path)
        loaded_matrix = load_matrix(tmp_path)
        assert (loaded_matrix.bits == matrix.bits).all()
        assert loaded_matrix.n_paths == matrix.n_paths

    def test_empty_store_round_trip(self, tmp_path):
        from missingpath.harvest import EntityIndex
        from missingpath.store import EntityVectorStore

        store = EntityVectorStore(entity_index=EntityIndex(), paths=[], by_entity=[])
        save_vectors(store, tmp_path)
        loaded = load_vectors(tmp_path, store.entity_index, store.paths)
        assert loaded == store

    def test_version_mismatch_raises(self, tmp_path, four_books_path):
        store, _ = ingest_fixture(four_books_path, BOOK)
        save_vectors(store, tmp_path)
        target = tmp_path / "vectors.ndjson"
        lines = target.read_text(encoding="utf-8").splitlines()
        lines[0] = lines[0].replace('"version": 1', '"version": 99')
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(StoreFormatError, match="migration"):
            load_vectors(tmp_path, store.entity_index, store.paths)

    def test_corrupted_row_names_entity(self, tmp_path, four_books_path):
        store, _ = ingest_fixture(four_books_path, BOOK)
        save_vectors(store, tmp_path)
        target = tmp_path / "vectors.ndjson"
        lines = target.read_text(encoding="utf-8").splitlines()
        # Damage entity 2's row: drop a cell.
        import json

        record = json.loads(lines[3])
        assert record["id"] == 2
        record["cells"] = record["cells"][:-1]
        lines[3] = json.dumps(record)
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(StoreFormatError, match="entity 2"):
            load_vectors(tmp_path, store.entity_index, store.paths)

    def test_matrix_magic_check(self, tmp_path):
        (tmp_path / "matrix.bin").write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(StoreFormatError):
            load_matrix(tmp_path)
