"""Selection export: condition.csv, selection.csv, summary.csv (+ zip).

Always three files together, RFC-4180 quoting, UTF-8, LF line endings,
byte-stable for identical inputs.
"""

from __future__ import annotations

import csv
import io
import zipfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import ValidationError
from .paths import PathPattern
from .selection import Selection, Scope, condition_pseudocode, resolve_labels
from .store import EntityVectorStore
from .summaries import FACETS, PathSummary

CONDITION_HEADER = ["position", "pseudocode", "negated", "scope"]
SELECTION_HEADER = ["uri", "label"]
SUMMARY_HEADER = ["path_index", "path_label", "set", "facet", "bucket_key", "count", "is_other"]


@dataclass
class ExportBundle:
    condition_csv: str
    selection_csv: str
    summary_csv: str
    collection_id: str
    created_at: datetime

    def filename(self) -> str:
        stamp = self.created_at.strftime("%Y%m%dT%H%M%SZ")
        return f"export_{self.collection_id}_{stamp}.zip"

    def as_zip(self) -> bytes:
        buffer = io.BytesIO()
        # Fixed timestamps keep archive bytes stable for identical inputs.
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as zf:
            for name, content in (
                ("condition.csv", self.condition_csv),
                ("selection.csv", self.selection_csv),
                ("summary.csv", self.summary_csv),
            ):
                info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
                zf.writestr(info, content)
        return buffer.getvalue()

    def write_to(self, directory: str | Path) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for name, content in (
            ("condition.csv", self.condition_csv),
            ("selection.csv", self.selection_csv),
            ("summary.csv", self.summary_csv),
        ):
            target = directory / name
            target.write_text(content, encoding="utf-8")
            written.append(target)
        return written


def _csv_text(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _summary_rows(
    summaries: list[PathSummary], paths: list[PathPattern], which: str
) -> list[list]:
    rows = []
    for summary in summaries:
        label = paths[summary.path_index].label
        for facet in FACETS:
            fs = summary.facet(facet)
            for bucket in fs.buckets:
                rows.append(
                    [summary.path_index, label, which, facet, bucket.key, bucket.count, False]
                )
            if fs.other_count > 0:
                rows.append(
                    [summary.path_index, label, which, facet, "other", fs.other_count, True]
                )
    return rows


def export(
    selection: Selection,
    full_summaries: list[PathSummary],
    subset_summaries: list[PathSummary],
    store: EntityVectorStore,
    collection_id: str,
    preferred_language: str = "en",
    created_at: datetime | None = None,
) -> ExportBundle:
    """Serialize a resolved selection and its summaries.

    A selection supplied as a bare entity list (no conditions) still
    produces all three files; condition.csv is then header-only.
    """
    if selection.query_used is None:
        raise ValidationError("selection must carry the query that produced it")

    condition_rows = [
        [
            position,
            condition_pseudocode(cond, store),
            cond.negated,
            "whole_set" if selection.query_used.scope is Scope.WHOLE_SET else "current_selection",
        ]
        for position, cond in enumerate(selection.query_used.conditions)
    ]
    selection_rows = [
        [uri_text, label]
        for uri_text, label in resolve_labels(
            selection.entity_ids, store, preferred_language
        )
    ]
    summary_rows = _summary_rows(full_summaries, store.paths, "full")
    if selection.entity_ids:
        summary_rows += _summary_rows(subset_summaries, store.paths, "subset")

    return ExportBundle(
        condition_csv=_csv_text(CONDITION_HEADER, condition_rows),
        selection_csv=_csv_text(SELECTION_HEADER, selection_rows),
        summary_csv=_csv_text(SUMMARY_HEADER, summary_rows),
        collection_id=collection_id,
        created_at=created_at or datetime.now(timezone.utc),
    )
