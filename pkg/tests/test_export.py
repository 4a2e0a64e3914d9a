"""Export: three CSVs, RFC-4180 quoting, byte stability, round-trip."""

from __future__ import annotations

import csv
import io
import zipfile
from datetime import datetime, timezone

from missingpath.export import export
from missingpath.harvest import EntityIndex
from missingpath.paths import PathPattern
from missingpath.selection import (
    Condition,
    ConditionKind,
    SelectionQuery,
    Selection,
    resolve,
)
from missingpath.store import EntityVectorStore, PathCell
from missingpath.summaries import summarize

EX = "http://example.org/"
STAMP = datetime(2021, 6, 1, 12, 0, 0, tzinfo=timezone.utc)


def tricky_store() -> EntityVectorStore:
    """Labels with commas, quotes and newlines to exercise CSV quoting."""
    index = EntityIndex()
    cells = []
    values = ['plain', 'with, comma', 'with "quotes"', "multi\nline", "ünïcode"]
    for i in range(10):
        index.add(f"{EX}e{i}")
        cells.append(
            [
                PathCell(values=(values[i % 5],)),
                PathCell(values=("x",)) if i % 2 == 0 else None,
            ]
        )
    paths = [
        PathPattern(0, (EX + "p0",), 1, 1.0, 10, "ex:p0"),
        PathPattern(1, (EX + "p1",), 1, 0.5, 5, "ex:p1"),
    ]
    return EntityVectorStore(entity_index=index, paths=paths, by_entity=cells)


def make_bundle(store=None, ids=None):
    store = store or tricky_store()
    cond = Condition(kind=ConditionKind.PATH, path_index=1, present=True)
    selection = resolve(SelectionQuery(conditions=(cond,)), store)
    if ids is not None:
        selection = Selection(query_used=selection.query_used, entity_ids=ids)
    full = [summarize(range(store.n_entities), p.index, store) for p in store.paths]
    subset = [summarize(selection.entity_ids, p.index, store) for p in store.paths]
    return (
        export(selection, full, subset, store, "demo", created_at=STAMP),
        selection,
        full,
        subset,
        store,
    )


class TestExportBundle:
    def test_three_files_produced(self):
        bundle, *_ = make_bundle()
        archive = zipfile.ZipFile(io.BytesIO(bundle.as_zip()))
        assert sorted(archive.namelist()) == [
            "condition.csv",
            "selection.csv",
            "summary.csv",
        ]
        assert bundle.filename() == "export_demo_20210601T120000Z.zip"

    def test_headers(self):
        bundle, *_ = make_bundle()
        assert bundle.condition_csv.splitlines()[0] == "position,pseudocode,negated,scope"
        assert bundle.selection_csv.splitlines()[0] == "uri,label"
        assert (
            bundle.summary_csv.splitlines()[0]
            == "path_index,path_label,set,facet,bucket_key,count,is_other"
        )

    def test_empty_selection(self):
        bundle, *_ = make_bundle(ids=[])
        rows = list(csv.reader(io.StringIO(bundle.selection_csv)))
        assert rows == [["uri", "label"]]
        summary_rows = list(csv.DictReader(io.StringIO(bundle.summary_csv)))
        assert all(r["set"] == "full" for r in summary_rows)

    def test_rfc4180_round_trip(self):
        bundle, selection, full, subset, store = make_bundle()
        rows = list(csv.DictReader(io.StringIO(bundle.summary_csv)))
        by_key = {}
        for r in rows:
            key = (int(r["path_index"]), r["set"], r["facet"], r["bucket_key"])
            by_key[key] = (int(r["count"]), r["is_other"] == "True")
        for which, summaries in (("full", full), ("subset", subset)):
            for summary in summaries:
                fs = summary.values
                for b in fs.buckets:
                    assert by_key[(summary.path_index, which, "values", b.key)] == (
                        b.count,
                        False,
                    )
                if fs.other_count:
                    assert by_key[(summary.path_index, which, "values", "other")] == (
                        fs.other_count,
                        True,
                    )
        # quoting: parsed labels equal the stored display values
        parsed = list(csv.reader(io.StringIO(bundle.selection_csv)))[1:]
        uris = [u for u, _ in parsed]
        assert uris == [store.entity_index.entries[e][0] for e in selection.entity_ids]

    def test_byte_stability(self):
        bundle1, *_ = make_bundle()
        bundle2, *_ = make_bundle()
        assert bundle1.as_zip() == bundle2.as_zip()
        assert bundle1.condition_csv == bundle2.condition_csv

    def test_condition_rows(self):
        bundle, selection, *_ = make_bundle()
        rows = list(csv.DictReader(io.StringIO(bundle.condition_csv)))
        assert len(rows) == 1
        assert rows[0]["position"] == "0"
        assert rows[0]["pseudocode"] == "HAVING the path ex:p1"
        assert rows[0]["negated"] == "False"
        assert rows[0]["scope"] == "whole_set"

    def test_write_to_disk(self, tmp_path):
        bundle, *_ = make_bundle()
        written = bundle.write_to(tmp_path)
        assert sorted(p.name for p in written) == [
            "condition.csv",
            "selection.csv",
            "summary.csv",
        ]
        assert (tmp_path / "selection.csv").read_text(encoding="utf-8") == bundle.selection_csv
