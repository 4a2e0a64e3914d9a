"""Command-line interface: ingest a collection, serve the API, export."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .errors import MissingPathError
from .gateway import EndpointConfig
from .workspace import IngestSettings, Workspace, collection_id_for, ingest

ENV_DATA = "MISSINGPATH_DATA"
ENV_PORT = "MISSINGPATH_PORT"


@click.group()
def main():
    """Incompleteness analytics for knowledge-graph collections."""


@main.command("ingest")
@click.option("--endpoint", "endpoint_url", required=True,
              help="SPARQL endpoint URL or N-Triples fixture path.")
@click.option("--class", "class_uri", required=True, help="Collection class URI.")
@click.option("--depth", default=2, show_default=True, help="Maximum path depth.")
@click.option("--out", "out_dir", default=None,
              help=f"Data directory (default ${ENV_DATA} or ./data).")
@click.option("--quota", default=10000, show_default=True,
              help="Endpoint result-row quota.")
@click.option("--min-coverage", default=0.0, show_default=True,
              help="Prune paths below this completeness rate.")
def ingest_command(endpoint_url, class_uri, depth, out_dir, quota, min_coverage):
    """Run the full pipeline for one collection and persist its artifacts."""
    data_dir = Path(out_dir or os.environ.get(ENV_DATA) or "data")
    collection_id = collection_id_for(class_uri, endpoint_url, depth)
    settings = IngestSettings(
        class_uri=class_uri,
        endpoint=EndpointConfig(base_url=endpoint_url, quota=quota),
        max_depth=depth,
        min_coverage=min_coverage,
    )

    last = {"pct": -1}

    def report(fraction: float) -> None:
        pct = int(fraction * 100)
        if pct != last["pct"]:
            last["pct"] = pct
            click.echo(f"\r  progress {pct:3d}%", nl=False)

    click.echo(f"ingesting {class_uri} into {data_dir / collection_id}")
    try:
        descriptor = ingest(data_dir, collection_id, settings, progress=report)
    except MissingPathError as exc:
        click.echo(f"\ningest failed: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"\nready: {descriptor.entity_count} entities, {descriptor.path_count} paths"
    )
    click.echo(f"collection id: {collection_id}")


@main.command("serve")
@click.option("--data", "data_dir", default=None,
              help=f"Data directory (default ${ENV_DATA} or ./data).")
@click.option("--port", default=None, type=int,
              help=f"Port (default ${ENV_PORT} or 8000).")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve_command(data_dir, port, host):
    """Serve the HTTP API over a data directory."""
    from .service import serve

    data = Path(data_dir or os.environ.get(ENV_DATA) or "data")
    port = port or int(os.environ.get(ENV_PORT, "8000"))
    serve(data, port=port, host=host)


@main.command("export")
@click.option("--collection", "collection_id", required=True)
@click.option("--query", "query_file", required=True, type=click.Path(exists=True),
              help="JSON file holding the selection query.")
@click.option("--data", "data_dir", default=None,
              help=f"Data directory (default ${ENV_DATA} or ./data).")
@click.option("--out", "out_dir", default=".",
              help="Directory receiving condition/selection/summary CSVs.")
def export_command(collection_id, query_file, data_dir, out_dir):
    """Resolve a selection query offline and write the three CSV files."""
    from .export import export as build_export
    from .selection import Condition, ConditionKind, Scope, SelectionQuery, resolve

    data = Path(data_dir or os.environ.get(ENV_DATA) or "data")
    workspace = Workspace(data)
    try:
        collection = workspace.get(collection_id)
    except KeyError:
        click.echo(f"unknown collection {collection_id}", err=True)
        sys.exit(1)

    doc = json.loads(Path(query_file).read_text(encoding="utf-8"))
    conditions = tuple(
        Condition(
            kind=ConditionKind(c["kind"]),
            negated=c.get("negated", False),
            path_index=c.get("path_index"),
            present=c.get("present", True),
            facet=c.get("facet", "values"),
            bucket_key=c.get("bucket_key"),
            member_keys=tuple(c["member_keys"]) if c.get("member_keys") else None,
            is_other=c.get("is_other", False),
            zone_id=c.get("zone_id"),
            polygon=tuple(map(tuple, c["polygon"])) if c.get("polygon") else None,
        )
        for c in doc["conditions"]
    )
    query = SelectionQuery(conditions=conditions, scope=Scope(doc.get("scope", "whole_set")))
    selection = resolve(query, collection.store, collection.map)
    full = [collection.full_summary(p.index) for p in collection.paths]
    subset = [
        collection.subset_summary(p.index, selection.entity_ids)
        for p in collection.paths
    ]
    bundle = build_export(
        selection, full, subset, collection.store, collection_id,
        preferred_language=doc.get("preferred_language", "en"),
    )
    written = bundle.write_to(out_dir)
    click.echo(f"{len(selection.entity_ids)} entities selected")
    for path in written:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
