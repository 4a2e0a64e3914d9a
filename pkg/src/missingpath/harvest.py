"""Complete entity retrieval from quota-limited endpoints.

An endpoint never returns more than ``quota`` rows and offers no reliable
pagination, so the full URI list is assembled by partitioning on the
values of a well-covered path: one query per value bucket plus one for
the entities the path does not describe, each guaranteed to fit under
the quota before it is issued.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IntegrityError, StoreFormatError, UnpartitionableError
from .gateway import Gateway, QueryKind, StructuredQuery
from .paths import PathPattern, count_all_entities
from .terms import Term

ENTITIES_FILENAME = "entities.csv"
ENTITIES_HEADER = ["id", "uri"]


@dataclass
class HarvestConfig:
    max_unique_values: int = 30
    escalation_factor: int = 2
    escalation_cap: int = 1024

    def __post_init__(self):
        if self.max_unique_values < 1:
            raise ValueError("max_unique_values must be >= 1")
        if self.escalation_factor < 2:
            raise ValueError("escalation_factor must be >= 2")


@dataclass
class PartitionPlan:
    partition_path: PathPattern | None
    value_buckets: list[tuple[Term, int]]
    uncovered_count: int
    total_entities: int

    @property
    def is_direct(self) -> bool:
        """True when the whole collection fits in one query."""
        return self.partition_path is None


@dataclass
class EntityIndex:
    entries: list[tuple[str, int]] = field(default_factory=list)
    _by_uri: dict[str, int] = field(default_factory=dict, repr=False)

    def add(self, uri_text: str) -> int:
        existing = self._by_uri.get(uri_text)
        if existing is not None:
            return existing
        idx = len(self.entries)
        self.entries.append((uri_text, idx))
        self._by_uri[uri_text] = idx
        return idx

    def id_of(self, uri_text: str) -> int | None:
        return self._by_uri.get(uri_text)

    def uris(self) -> list[str]:
        return [u for u, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def plan_partition(
    paths: list[PathPattern],
    cfg: HarvestConfig,
    gateway: Gateway,
    class_uri: str,
    total_entities: int | None = None,
) -> PartitionPlan:
    """Choose a path whose value buckets all fit under the quota.

    Paths are scanned best-covered first. A candidate qualifies when it has
    few enough distinct terminal values, its largest bucket is below the
    quota, and so is the count of entities it does not cover. When no path
    qualifies the unique-value allowance is escalated multiplicatively up
    to a hard cap.
    """
    quota = gateway.cfg.quota
    if total_entities is None:
        total_entities = count_all_entities(gateway, class_uri)
    if total_entities < quota:
        return PartitionPlan(
            partition_path=None, value_buckets=[], uncovered_count=total_entities,
            total_entities=total_entities,
        )

    max_unique = cfg.max_unique_values
    while max_unique <= cfg.escalation_cap:
        for path in paths:
            histogram = gateway.execute(
                StructuredQuery(
                    kind=QueryKind.VALUE_HISTOGRAM_AT_PATH,
                    class_uri=class_uri,
                    path=path.predicates,
                    limit=min(max_unique + 1, quota),
                )
            )
            # A histogram that fills the quota may itself be truncated, so
            # its value list cannot be trusted to enumerate the buckets.
            if len(histogram) > max_unique or len(histogram) >= quota:
                continue
            buckets = [(value, int(count.text)) for value, count in histogram.rows]
            if not buckets:
                continue
            uncovered = total_entities - path.covered_count
            if all(n < quota for _, n in buckets) and uncovered < quota:
                return PartitionPlan(
                    partition_path=path,
                    value_buckets=buckets,
                    uncovered_count=uncovered,
                    total_entities=total_entities,
                )
        max_unique *= cfg.escalation_factor

    raise UnpartitionableError(
        f"no path partitions {total_entities} entities under quota {quota}; "
        f"raise the endpoint quota or the enumeration depth"
    )


def harvest(
    plan: PartitionPlan,
    class_uri: str,
    gateway: Gateway,
) -> EntityIndex:
    """Fetch every entity URI according to the plan.

    Bucket results are merged in first-seen order and deduplicated; any
    sub-query that fills the quota exactly is treated as truncated and
    rejected, because silent truncation would break the completeness
    guarantee every later stage relies on.
    """
    quota = gateway.cfg.quota
    index = EntityIndex()

    if plan.is_direct:
        table = gateway.execute(
            StructuredQuery(
                kind=QueryKind.TERMINAL_VALUES_FOR_ALL_ENTITIES,
                class_uri=class_uri,
                path=(),
            )
        )
        _check_not_truncated(len(table), quota, "direct fetch")
        for row in table.rows:
            index.add(row[0].text)
        return index

    path = plan.partition_path.predicates
    queries = [
        StructuredQuery(
            kind=QueryKind.ENTITIES_WITH_VALUE_AT_PATH,
            class_uri=class_uri,
            path=path,
            value=value,
        )
        for value, _ in plan.value_buckets
    ]
    queries.append(
        StructuredQuery(
            kind=QueryKind.ENTITIES_WITHOUT_PATH, class_uri=class_uri, path=path
        )
    )
    for query, table in zip(queries, gateway.execute_many(queries)):
        _check_not_truncated(len(table), quota, query.kind.value)
        for (entity,) in table.rows:
            index.add(entity.text)
    return index


def _check_not_truncated(n_rows: int, quota: int, what: str) -> None:
    if n_rows >= quota:
        raise IntegrityError(
            f"{what} returned {n_rows} rows at quota {quota}: result may be truncated"
        )


def save_entities(index: EntityIndex, directory: str | Path) -> Path:
    target = Path(directory) / ENTITIES_FILENAME
    with open(target, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ENTITIES_HEADER)
        for uri_text, idx in index.entries:
            writer.writerow([idx, uri_text])
    return target


def load_entities(directory: str | Path) -> EntityIndex:
    target = Path(directory) / ENTITIES_FILENAME
    index = EntityIndex()
    with open(target, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ENTITIES_HEADER:
            raise StoreFormatError(f"unexpected entities header in {target}")
        for idx, uri_text in reader:
            assigned = index.add(uri_text)
            if assigned != int(idx):
                raise StoreFormatError(f"non-dense entity ids in {target} near id {idx}")
    return index
