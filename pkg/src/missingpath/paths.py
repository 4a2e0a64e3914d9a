"""Property-path discovery and completeness rates for a collection.

Patterns are found breadth-first up to a depth bound: depth-1 predicates
come straight off the instances, deeper ones extend any pattern whose
terminals are entities (chains ending at literals cannot grow, since a
literal is never the subject of a triple). Each pattern's coverage is
counted with one aggregate query.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyCollectionError, StoreFormatError
from .gateway import Gateway, QueryKind, StructuredQuery
from .terms import path_label

PATHS_FILENAME = "paths.csv"
PATHS_HEADER = ["index", "predicates", "depth", "covered_count", "completeness", "label"]


@dataclass(frozen=True)
class PathPattern:
    index: int
    predicates: tuple[str, ...]
    depth: int
    completeness: float
    covered_count: int
    label: str


@dataclass
class EnumerationConfig:
    class_uri: str
    max_depth: int = 2
    min_coverage: float = 0.0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


def count_all_entities(gateway: Gateway, class_uri: str) -> int:
    return gateway.count(
        StructuredQuery(kind=QueryKind.COUNT_ALL_ENTITIES, class_uri=class_uri)
    )


def enumerate_paths(
    cfg: EnumerationConfig,
    gateway: Gateway,
    total_entities: int | None = None,
) -> list[PathPattern]:
    """Discover all path patterns up to ``cfg.max_depth`` with their rates.

    The result is sorted by completeness descending, ties broken by depth
    then lexicographic predicate order, and indexed densely from 0 -- so
    re-running against unchanged data is byte-identical.
    """
    if total_entities is None:
        total_entities = count_all_entities(gateway, cfg.class_uri)
    if total_entities == 0:
        raise EmptyCollectionError(f"no instances of {cfg.class_uri}")

    chains: list[tuple[str, ...]] = []
    frontier: list[tuple[str, ...]] = [()]
    for _depth in range(1, cfg.max_depth + 1):
        queries = [
            StructuredQuery(
                kind=QueryKind.DISTINCT_PREDICATES_AT_DEPTH,
                class_uri=cfg.class_uri,
                path=prefix,
            )
            for prefix in frontier
        ]
        tables = gateway.execute_many(queries)
        nxt: list[tuple[str, ...]] = []
        seen_next: set[tuple[str, ...]] = set()
        for prefix, table in zip(frontier, tables):
            for (pred,) in table.rows:
                chain = prefix + (pred.text,)
                if chain not in seen_next:
                    seen_next.add(chain)
                    nxt.append(chain)
        chains.extend(nxt)
        frontier = nxt
        if not frontier:
            break

    count_queries = [
        StructuredQuery(
            kind=QueryKind.COUNT_ENTITIES_WITH_PATH, class_uri=cfg.class_uri, path=chain
        )
        for chain in chains
    ]
    covered = [
        int(t.rows[0][0].text) if t.rows else 0
        for t in gateway.execute_many(count_queries)
    ]

    entries = sorted(
        zip(chains, covered),
        key=lambda cc: (-cc[1] / total_entities, len(cc[0]), cc[0]),
    )
    return [
        PathPattern(
            index=i,
            predicates=chain,
            depth=len(chain),
            completeness=n / total_entities,
            covered_count=n,
            label=path_label(chain),
        )
        for i, (chain, n) in enumerate(entries)
    ]


def prune(paths: list[PathPattern], min_coverage: float = 0.0) -> list[PathPattern]:
    """Drop patterns below the coverage threshold.

    On a completeness-sorted list this removes a suffix, so the remaining
    indices stay dense without reassignment.
    """
    return [p for p in paths if p.completeness >= min_coverage]


def save_paths(paths: list[PathPattern], directory: str | Path) -> Path:
    target = Path(directory) / PATHS_FILENAME
    with open(target, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PATHS_HEADER)
        for p in paths:
            writer.writerow(
                [p.index, " ".join(p.predicates), p.depth, p.covered_count,
                 repr(p.completeness), p.label]
            )
    return target


def load_paths(directory: str | Path) -> list[PathPattern]:
    target = Path(directory) / PATHS_FILENAME
    paths: list[PathPattern] = []
    with open(target, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PATHS_HEADER:
            raise StoreFormatError(f"unexpected paths header in {target}")
        for row in reader:
            index, predicates, depth, covered, completeness, label = row
            paths.append(
                PathPattern(
                    index=int(index),
                    predicates=tuple(predicates.split(" ")) if predicates else (),
                    depth=int(depth),
                    completeness=float(completeness),
                    covered_count=int(covered),
                    label=label,
                )
            )
    return paths
